#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/**
 * Linear programs in the form
 *
 *     minimize    c^T x
 *     subject to  A x  = b
 *                 G x <= h
 *                 0 <= x_j <= upper_j   or   x_j free
 *
 * and a bundled dense-pricing revised simplex solver for them.
 */
namespace broil::lp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

enum class LowerBound { Zero, Free };

/// A named contiguous range of variables, e.g. {"u", 0, S*A}.
struct VariableBlock {
    std::string name;
    Eigen::Index offset = 0;
    Eigen::Index size = 0;
};

struct StandardFormLP {
    Eigen::VectorXd objective;
    SparseMatrix eq_matrix;
    Eigen::VectorXd eq_rhs;
    SparseMatrix ineq_matrix;
    Eigen::VectorXd ineq_rhs;
    std::vector<LowerBound> lower_bounds;
    /// Empty means no upper bounds; otherwise one entry per variable (+inf for none).
    /// Finite entries are only allowed on variables with a zero lower bound.
    std::vector<double> upper_bounds;
    std::vector<VariableBlock> variable_map;

    Eigen::Index num_variables() const { return objective.size(); }
    void validate() const;
    /// Throws std::out_of_range for an unknown name.
    const VariableBlock& block(std::string_view name) const;
    Eigen::VectorXd slice(const Eigen::VectorXd& x, std::string_view name) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    Eigen::VectorXd eq_duals;   ///< multipliers of A x = b
    Eigen::VectorXd ineq_duals; ///< multipliers of G x <= h (nonpositive at optimum)
    std::size_t iterations = 0;
    double primal_residual = 0.0;   ///< max violation of equalities, inequalities and bounds
    double dual_infeasibility = 0.0; ///< largest reduced cost of the wrong sign
    double duality_gap = 0.0;        ///< |c^T x - dual objective|
};

struct SimplexOptions {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    std::size_t refactor_interval = 64;
    std::size_t max_iterations = 2'000'000;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t degenerate_streak_for_bland = 50;
};

/// Raised when the basis cannot be factorized.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two-phase revised simplex. Deterministic for identical input.
LpSolution solve_lp(const StandardFormLP& lp, const SimplexOptions& options = {});

} // namespace broil::lp
