#include "broil/lp.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace broil::lp {

void StandardFormLP::validate() const {
    const auto n = num_variables();
    if (n == 0) throw std::invalid_argument("lp: no variables");
    if (eq_matrix.cols() != n || ineq_matrix.cols() != n)
        throw std::invalid_argument("lp: constraint matrices must have one column per variable");
    if (eq_matrix.rows() != eq_rhs.size()) throw std::invalid_argument("lp: equality rhs size mismatch");
    if (ineq_matrix.rows() != ineq_rhs.size()) throw std::invalid_argument("lp: inequality rhs size mismatch");
    if (static_cast<Eigen::Index>(lower_bounds.size()) != n) throw std::invalid_argument("lp: one bound per variable");
    if (!upper_bounds.empty()) {
        if (static_cast<Eigen::Index>(upper_bounds.size()) != n)
            throw std::invalid_argument("lp: upper_bounds must be empty or have one entry per variable");
        for (Eigen::Index j = 0; j < n; ++j) {
            const double ub = upper_bounds[static_cast<std::size_t>(j)];
            if (std::isnan(ub) || ub < 0.0) throw std::invalid_argument("lp: upper bounds must be nonnegative");
            if (std::isfinite(ub) && lower_bounds[static_cast<std::size_t>(j)] == LowerBound::Free)
                throw std::invalid_argument("lp: free variables cannot carry an upper bound");
        }
    }
    for (const auto& b : variable_map)
        if (b.offset < 0 || b.size < 0 || b.offset + b.size > n)
            throw std::invalid_argument("lp: variable block '" + b.name + "' out of range");
}

const VariableBlock& StandardFormLP::block(std::string_view name) const {
    for (const auto& b : variable_map)
        if (b.name == name) return b;
    throw std::out_of_range("lp: no variable block named " + std::string(name));
}

Eigen::VectorXd StandardFormLP::slice(const Eigen::VectorXd& x, std::string_view name) const {
    const auto& b = block(name);
    return x.segment(b.offset, b.size);
}

std::string_view to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

namespace {

using Eigen::Index;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ColumnKind { Structural, Slack, Artificial };

struct ColumnOrigin {
    ColumnKind kind;
    Index source; // original variable (Structural), inequality row (Slack) or row (Artificial)
    double sign;  // +1, or -1 for the negative part of a free variable
};

struct Eta {
    Index row;
    double pivot;
    std::vector<std::pair<Index, double>> entries; // off-pivot nonzeros of the entering column
};

// Bounded revised simplex on   min c^T x,  A x = b (b >= 0),  0 <= x <= upper,
// with an LU factorization of the basis and a product-form eta file.
// Nonbasic columns sit at zero or, when flagged, at their finite upper bound.
class RevisedSimplex {
public:
    RevisedSimplex(const StandardFormLP& lp, const SimplexOptions& options) : lp_(lp), opt_(options) {
        build();
    }

    LpSolution run();

private:
    void build();
    void factorize();
    VectorXd ftran(VectorXd v) const;
    VectorXd btran(VectorXd v) const;
    VectorXd column(Index j) const;
    double column_dot(Index j, const VectorXd& y) const;
    VectorXd basic_costs(const VectorXd& costs) const;
    void recompute_primal();
    void pivot(Index entering, Index leave_row, const VectorXd& direction, double step, bool leaves_at_upper);
    LpStatus optimize(const VectorXd& costs);
    void drive_out_artificials();
    LpSolution finish(LpStatus status);

    bool is_artificial(Index j) const { return origin_[static_cast<std::size_t>(j)].kind == ColumnKind::Artificial; }

    const StandardFormLP& lp_;
    const SimplexOptions& opt_;

    Index m_ = 0;
    Index n_ = 0;
    SparseMatrix a_;
    VectorXd b_;
    VectorXd row_sign_;
    VectorXd upper_;
    std::vector<ColumnOrigin> origin_;
    VectorXd phase2_costs_;

    std::vector<Index> basis_;    // basis_[row] = column
    std::vector<Index> position_; // position_[column] = row or -1
    std::vector<char> at_upper_;  // nonbasic columns resting at their upper bound
    VectorXd x_basic_;

    mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;
    std::size_t iterations_ = 0;
};

void RevisedSimplex::build() {
    lp_.validate();
    const Index m_eq = lp_.eq_matrix.rows();
    const Index m_in = lp_.ineq_matrix.rows();
    m_ = m_eq + m_in;

    b_.resize(m_);
    b_ << lp_.eq_rhs, lp_.ineq_rhs;
    row_sign_ = VectorXd::Ones(m_);
    for (Index i = 0; i < m_; ++i)
        if (b_(i) < 0.0) {
            row_sign_(i) = -1.0;
            b_(i) = -b_(i);
        }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(lp_.eq_matrix.nonZeros() + lp_.ineq_matrix.nonZeros()) * 2 +
                     static_cast<std::size_t>(2 * m_));
    std::vector<double> upper;
    auto add_structural = [&](Index var, double sign) {
        const Index col = static_cast<Index>(origin_.size());
        for (SparseMatrix::InnerIterator it(lp_.eq_matrix, var); it; ++it)
            triplets.emplace_back(it.row(), col, sign * row_sign_(it.row()) * it.value());
        for (SparseMatrix::InnerIterator it(lp_.ineq_matrix, var); it; ++it)
            triplets.emplace_back(m_eq + it.row(), col, sign * row_sign_(m_eq + it.row()) * it.value());
        origin_.push_back({ColumnKind::Structural, var, sign});
        upper.push_back(lp_.upper_bounds.empty() ? kInf : lp_.upper_bounds[static_cast<std::size_t>(var)]);
    };
    for (Index j = 0; j < lp_.num_variables(); ++j) {
        if (lp_.lower_bounds[static_cast<std::size_t>(j)] == LowerBound::Free) {
            add_structural(j, 1.0);
            add_structural(j, -1.0);
        } else {
            add_structural(j, 1.0);
        }
    }
    for (Index i = 0; i < m_in; ++i) {
        const Index col = static_cast<Index>(origin_.size());
        triplets.emplace_back(m_eq + i, col, row_sign_(m_eq + i));
        origin_.push_back({ColumnKind::Slack, i, 1.0});
        upper.push_back(kInf);
    }

    // Crash basis: a column whose only nonzero is positive in row i can start basic there.
    basis_.assign(static_cast<std::size_t>(m_), -1);
    {
        SparseMatrix partial(m_, static_cast<Index>(origin_.size()));
        partial.setFromTriplets(triplets.begin(), triplets.end());
        auto try_column = [&](Index col) {
            if (partial.col(col).nonZeros() != 1) return;
            SparseMatrix::InnerIterator it(partial, col);
            if (it.value() > 0.0 && basis_[static_cast<std::size_t>(it.row())] < 0 &&
                b_(it.row()) / it.value() <= upper[static_cast<std::size_t>(col)])
                basis_[static_cast<std::size_t>(it.row())] = col;
        };
        const Index num_cols = static_cast<Index>(origin_.size());
        for (Index col = 0; col < num_cols; ++col)
            if (origin_[static_cast<std::size_t>(col)].kind == ColumnKind::Slack) try_column(col);
        for (Index col = 0; col < num_cols; ++col)
            if (origin_[static_cast<std::size_t>(col)].kind == ColumnKind::Structural) try_column(col);
    }
    for (Index i = 0; i < m_; ++i) {
        if (basis_[static_cast<std::size_t>(i)] >= 0) continue;
        const Index col = static_cast<Index>(origin_.size());
        triplets.emplace_back(i, col, 1.0);
        origin_.push_back({ColumnKind::Artificial, i, 1.0});
        upper.push_back(kInf);
        basis_[static_cast<std::size_t>(i)] = col;
    }

    n_ = static_cast<Index>(origin_.size());
    a_.resize(m_, n_);
    a_.setFromTriplets(triplets.begin(), triplets.end());
    a_.makeCompressed();
    upper_ = Eigen::Map<const VectorXd>(upper.data(), n_);

    phase2_costs_ = VectorXd::Zero(n_);
    for (Index j = 0; j < n_; ++j) {
        const auto& o = origin_[static_cast<std::size_t>(j)];
        if (o.kind == ColumnKind::Structural) phase2_costs_(j) = o.sign * lp_.objective(o.source);
    }
    position_.assign(static_cast<std::size_t>(n_), -1);
    at_upper_.assign(static_cast<std::size_t>(n_), 0);
    for (Index i = 0; i < m_; ++i) position_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = i;
}

void RevisedSimplex::factorize() {
    etas_.clear();
    if (m_ == 0) return;
    SparseMatrix basis_matrix(m_, m_);
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index i = 0; i < m_; ++i)
        for (SparseMatrix::InnerIterator it(a_, basis_[static_cast<std::size_t>(i)]); it; ++it)
            triplets.emplace_back(it.row(), i, it.value());
    basis_matrix.setFromTriplets(triplets.begin(), triplets.end());
    basis_matrix.makeCompressed();
    lu_.analyzePattern(basis_matrix);
    lu_.factorize(basis_matrix);
    if (lu_.info() != Eigen::Success) throw SolverError("simplex: basis factorization failed: " + lu_.lastErrorMessage());
}

VectorXd RevisedSimplex::ftran(VectorXd v) const {
    if (m_ == 0) return v;
    v = lu_.solve(v);
    for (const auto& eta : etas_) {
        const double xr = v(eta.row) / eta.pivot;
        if (xr != 0.0)
            for (const auto& [i, d] : eta.entries) v(i) -= d * xr;
        v(eta.row) = xr;
    }
    return v;
}

VectorXd RevisedSimplex::btran(VectorXd v) const {
    if (m_ == 0) return v;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double acc = v(it->row);
        for (const auto& [i, d] : it->entries) acc -= v(i) * d;
        v(it->row) = acc / it->pivot;
    }
    return lu_.transpose().solve(v);
}

VectorXd RevisedSimplex::column(Index j) const {
    VectorXd col = VectorXd::Zero(m_);
    for (SparseMatrix::InnerIterator it(a_, j); it; ++it) col(it.row()) = it.value();
    return col;
}

double RevisedSimplex::column_dot(Index j, const VectorXd& y) const {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(a_, j); it; ++it) acc += it.value() * y(it.row());
    return acc;
}

VectorXd RevisedSimplex::basic_costs(const VectorXd& costs) const {
    VectorXd cb(m_);
    for (Index i = 0; i < m_; ++i) cb(i) = costs(basis_[static_cast<std::size_t>(i)]);
    return cb;
}

void RevisedSimplex::recompute_primal() {
    VectorXd rhs = b_;
    for (Index j = 0; j < n_; ++j)
        if (at_upper_[static_cast<std::size_t>(j)])
            for (SparseMatrix::InnerIterator it(a_, j); it; ++it) rhs(it.row()) -= it.value() * upper_(j);
    x_basic_ = ftran(rhs);
    for (Index i = 0; i < m_; ++i) {
        const double ub = upper_(basis_[static_cast<std::size_t>(i)]);
        if (x_basic_(i) < 0.0 && x_basic_(i) > -opt_.feasibility_tol) x_basic_(i) = 0.0;
        if (x_basic_(i) > ub && x_basic_(i) < ub + opt_.feasibility_tol) x_basic_(i) = ub;
    }
}

// `direction` is B^-1 a_q signed by the move of the entering column: basics change by -step * direction.
void RevisedSimplex::pivot(Index entering, Index leave_row, const VectorXd& direction, double step,
                           bool leaves_at_upper) {
    const bool entering_from_upper = at_upper_[static_cast<std::size_t>(entering)] != 0;
    const double entering_value = entering_from_upper ? upper_(entering) - step : step;
    x_basic_ -= step * direction;

    const Index leaving = basis_[static_cast<std::size_t>(leave_row)];
    position_[static_cast<std::size_t>(leaving)] = -1;
    at_upper_[static_cast<std::size_t>(leaving)] = leaves_at_upper ? 1 : 0;
    position_[static_cast<std::size_t>(entering)] = leave_row;
    at_upper_[static_cast<std::size_t>(entering)] = 0;
    basis_[static_cast<std::size_t>(leave_row)] = entering;
    x_basic_(leave_row) = entering_value;
    for (Index i = 0; i < m_; ++i) {
        const double ub = upper_(basis_[static_cast<std::size_t>(i)]);
        x_basic_(i) = std::clamp(x_basic_(i), 0.0, ub);
    }

    // The eta file stores B^-1 a_q itself, whatever the direction of the move.
    const double sign = entering_from_upper ? -1.0 : 1.0;
    Eta eta{leave_row, sign * direction(leave_row), {}};
    for (Index i = 0; i < m_; ++i)
        if (i != leave_row && direction(i) != 0.0) eta.entries.emplace_back(i, sign * direction(i));
    etas_.push_back(std::move(eta));
    ++iterations_;

    if (etas_.size() >= opt_.refactor_interval) {
        factorize();
        recompute_primal();
    }
}

LpStatus RevisedSimplex::optimize(const VectorXd& costs) {
    std::size_t degenerate_streak = 0;
    bool bland = false;
    const double tol = opt_.feasibility_tol;

    while (iterations_ < opt_.max_iterations) {
        const VectorXd y = btran(basic_costs(costs));

        // Pricing: largest infeasible reduced cost (Dantzig), or the lowest index under Bland's rule.
        Index entering = -1;
        double best = opt_.optimality_tol;
        for (Index j = 0; j < n_; ++j) {
            if (position_[static_cast<std::size_t>(j)] >= 0 || is_artificial(j) || upper_(j) == 0.0) continue;
            const double reduced = costs(j) - column_dot(j, y);
            const double gain = at_upper_[static_cast<std::size_t>(j)] ? reduced : -reduced;
            if (gain <= opt_.optimality_tol) continue;
            if (bland) {
                entering = j;
                break;
            }
            if (gain > best) {
                best = gain;
                entering = j;
            }
        }
        if (entering < 0) return LpStatus::Optimal;

        VectorXd direction = ftran(column(entering));
        if (at_upper_[static_cast<std::size_t>(entering)]) direction = -direction;

        // Harris two-pass ratio test; basics move by -step * direction.
        auto relaxed_ratio = [&](Index i) {
            const double d = direction(i);
            if (d > opt_.pivot_tol) return (x_basic_(i) + tol) / d;
            const double ub = upper_(basis_[static_cast<std::size_t>(i)]);
            if (d < -opt_.pivot_tol && std::isfinite(ub)) return (ub - x_basic_(i) + tol) / -d;
            return kInf;
        };
        auto exact_ratio = [&](Index i) {
            const double d = direction(i);
            if (d > 0.0) return x_basic_(i) / d;
            return (upper_(basis_[static_cast<std::size_t>(i)]) - x_basic_(i)) / -d;
        };
        double bound = kInf;
        for (Index i = 0; i < m_; ++i) bound = std::min(bound, relaxed_ratio(i));
        const double flip = upper_(entering);
        if (!std::isfinite(bound) && !std::isfinite(flip)) return LpStatus::Unbounded;

        double step = 0.0;
        if (flip <= bound) {
            // Bound flip: the entering column crosses to its other bound without a basis change.
            step = flip;
            x_basic_ -= step * direction;
            for (Index i = 0; i < m_; ++i)
                x_basic_(i) = std::clamp(x_basic_(i), 0.0, upper_(basis_[static_cast<std::size_t>(i)]));
            at_upper_[static_cast<std::size_t>(entering)] ^= 1;
            ++iterations_;
        } else {
            Index leave_row = -1;
            for (Index i = 0; i < m_; ++i) {
                if (relaxed_ratio(i) == kInf || exact_ratio(i) > bound) continue;
                if (leave_row < 0) {
                    leave_row = i;
                } else if (bland) {
                    if (basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave_row)])
                        leave_row = i;
                } else if (std::abs(direction(i)) > std::abs(direction(leave_row))) {
                    leave_row = i;
                }
            }
            step = std::max(0.0, exact_ratio(leave_row));
            pivot(entering, leave_row, direction, step, direction(leave_row) < 0.0);
        }

        if (step <= tol) {
            if (++degenerate_streak >= opt_.degenerate_streak_for_bland) bland = true;
        } else {
            degenerate_streak = 0;
            bland = false;
        }
    }
    return LpStatus::IterationLimit;
}

void RevisedSimplex::drive_out_artificials() {
    for (Index row = 0; row < m_; ++row) {
        if (!is_artificial(basis_[static_cast<std::size_t>(row)])) continue;
        VectorXd unit = VectorXd::Zero(m_);
        unit(row) = 1.0;
        const VectorXd basis_row = btran(unit);
        Index replacement = -1;
        double largest = 1e-7;
        for (Index j = 0; j < n_; ++j) {
            if (position_[static_cast<std::size_t>(j)] >= 0 || is_artificial(j)) continue;
            const double entry = std::abs(column_dot(j, basis_row));
            if (entry > largest) {
                largest = entry;
                replacement = j;
            }
        }
        // No replacement means the row is redundant; the artificial then stays basic at zero.
        if (replacement >= 0) {
            VectorXd direction = ftran(column(replacement));
            if (at_upper_[static_cast<std::size_t>(replacement)]) direction = -direction;
            x_basic_(row) = 0.0;
            pivot(replacement, row, direction, 0.0, false);
        }
    }
}

LpSolution RevisedSimplex::finish(LpStatus status) {
    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations_;
    const Index n_orig = lp_.num_variables();
    sol.x = VectorXd::Zero(n_orig);
    for (Index j = 0; j < n_; ++j) {
        const auto& o = origin_[static_cast<std::size_t>(j)];
        if (o.kind != ColumnKind::Structural) continue;
        const Index row = position_[static_cast<std::size_t>(j)];
        const double value = row >= 0 ? x_basic_(row) : (at_upper_[static_cast<std::size_t>(j)] ? upper_(j) : 0.0);
        sol.x(o.source) += o.sign * value;
    }
    sol.objective = lp_.objective.dot(sol.x);

    const VectorXd eq_res = lp_.eq_matrix * sol.x - lp_.eq_rhs;
    const VectorXd in_res = lp_.ineq_matrix * sol.x - lp_.ineq_rhs;
    double residual = eq_res.size() ? eq_res.cwiseAbs().maxCoeff() : 0.0;
    if (in_res.size()) residual = std::max(residual, in_res.maxCoeff());
    for (Index j = 0; j < n_orig; ++j) {
        if (lp_.lower_bounds[static_cast<std::size_t>(j)] == LowerBound::Zero) residual = std::max(residual, -sol.x(j));
        if (!lp_.upper_bounds.empty())
            residual = std::max(residual, sol.x(j) - lp_.upper_bounds[static_cast<std::size_t>(j)]);
    }
    sol.primal_residual = residual;

    if (status == LpStatus::Optimal) {
        const VectorXd y = btran(basic_costs(phase2_costs_));
        double worst = 0.0;
        double bound_term = 0.0;
        for (Index j = 0; j < n_; ++j) {
            if (is_artificial(j) || position_[static_cast<std::size_t>(j)] >= 0) continue;
            const double reduced = phase2_costs_(j) - column_dot(j, y);
            if (at_upper_[static_cast<std::size_t>(j)]) {
                worst = std::max(worst, reduced);
                bound_term += reduced * upper_(j);
            } else {
                worst = std::max(worst, -reduced);
            }
        }
        sol.dual_infeasibility = worst;
        const VectorXd y_orig = y.cwiseProduct(row_sign_);
        const Index m_eq = lp_.eq_matrix.rows();
        sol.eq_duals = y_orig.head(m_eq);
        sol.ineq_duals = y_orig.tail(m_ - m_eq);
        sol.duality_gap = std::abs(sol.objective - (y.dot(b_) + bound_term));
    }
    return sol;
}

LpSolution RevisedSimplex::run() {
    factorize();
    recompute_primal();

    bool has_artificial = false;
    VectorXd phase1_costs = VectorXd::Zero(n_);
    for (Index j = 0; j < n_; ++j)
        if (is_artificial(j)) {
            phase1_costs(j) = 1.0;
            has_artificial = true;
        }

    if (has_artificial) {
        const LpStatus phase1 = optimize(phase1_costs);
        if (phase1 == LpStatus::IterationLimit) return finish(phase1);
        factorize();
        recompute_primal();
        double infeasibility = 0.0;
        for (Index i = 0; i < m_; ++i)
            if (is_artificial(basis_[static_cast<std::size_t>(i)])) infeasibility += x_basic_(i);
        const double scale = std::max(1.0, b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0);
        if (infeasibility > 1e3 * opt_.feasibility_tol * scale) return finish(LpStatus::Infeasible);
        drive_out_artificials();
    }

    const LpStatus phase2 = optimize(phase2_costs_);
    factorize();
    recompute_primal();
    return finish(phase2);
}

} // namespace

LpSolution solve_lp(const StandardFormLP& lp, const SimplexOptions& options) {
    RevisedSimplex simplex(lp, options);
    return simplex.run();
}

} // namespace broil::lp
