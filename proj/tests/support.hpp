#pragma once

// Random instance generators and independent reference computations used by
// the unit and acceptance tests. Nothing here calls the code it checks.

#include "broil/lp.hpp"
#include "broil/mdp.hpp"
#include "broil/posterior.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace testing {

using broil::MatrixXd;
using broil::VectorXd;
using Eigen::Index;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_int(std::mt19937_64& rng, Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline VectorXd random_simplex(std::mt19937_64& rng, Index n, double sparsity = 0.0) {
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = uniform(rng, 0.0, 1.0) < sparsity ? 0.0 : -std::log(uniform(rng, 1e-12, 1.0));
    if (v.sum() == 0.0) v(uniform_int(rng, 0, n - 1)) = 1.0;
    return v / v.sum();
}

/// Random MDP with dense or sparse stochastic transitions and Gaussian features.
inline broil::TabularMDP random_mdp(std::mt19937_64& rng, Index states, Index actions, Index features,
                                    double gamma) {
    broil::TabularMDP mdp;
    mdp.num_states = states;
    mdp.num_actions = actions;
    mdp.gamma = gamma;
    const double sparsity = uniform(rng, 0.0, 0.7);
    for (Index a = 0; a < actions; ++a) {
        MatrixXd p(states, states);
        for (Index s = 0; s < states; ++s) p.row(s) = random_simplex(rng, states, sparsity).transpose();
        mdp.transitions.push_back(p);
    }
    mdp.p0 = random_simplex(rng, states);
    std::normal_distribution<double> normal;
    mdp.features = MatrixXd::NullaryExpr(states * actions, features, [&] { return normal(rng); });
    return mdp;
}

inline broil::StochasticPolicy random_policy(std::mt19937_64& rng, Index states, Index actions) {
    broil::StochasticPolicy pi;
    pi.probs.resize(states, actions);
    for (Index s = 0; s < states; ++s) pi.probs.row(s) = random_simplex(rng, actions).transpose();
    return pi;
}

/// Reward hypotheses drawn directly per state-action entry (no weight matrix).
inline broil::RewardPosterior random_reward_posterior(std::mt19937_64& rng, Index pairs, Index samples,
                                                      bool uniform_probs) {
    std::normal_distribution<double> normal;
    broil::RewardPosterior post;
    post.rewards = MatrixXd::NullaryExpr(pairs, samples, [&] { return normal(rng); });
    post.probs = uniform_probs ? VectorXd::Constant(samples, 1.0 / static_cast<double>(samples))
                               : random_simplex(rng, samples);
    return post;
}

// ---------------------------------------------------------------------------
// CVaR: average of the lowest (1 - alpha) probability mass.
// ---------------------------------------------------------------------------

inline double sorted_tail_cvar(const VectorXd& values, const VectorXd& probs, double alpha) {
    std::vector<Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) < values(b); });
    const double tail = 1.0 - alpha;
    double remaining = tail;
    double acc = 0.0;
    for (const Index i : order) {
        const double take = std::min(probs(i), remaining);
        acc += take * values(i);
        remaining -= take;
        if (remaining <= 0.0) break;
    }
    // Rounding can leave a sliver of unassigned mass; it belongs to the largest value.
    if (remaining > 0.0) acc += remaining * values(order.back());
    return acc / tail;
}

// ---------------------------------------------------------------------------
// Brute-force LP solution by enumerating bases of the equality form
//     min c^T x  s.t.  A_eq x = b_eq,  A_in x + s = b_in,  x, s >= 0
// Free variables are split; finite upper bounds become extra rows.
// Only meaningful for bounded problems.
// ---------------------------------------------------------------------------

struct VertexResult {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
};

inline VertexResult vertex_enumeration(const broil::lp::StandardFormLP& lp) {
    const Index n = lp.num_variables();
    std::vector<Index> source;
    std::vector<double> sign;
    for (Index j = 0; j < n; ++j) {
        source.push_back(j);
        sign.push_back(1.0);
        if (lp.lower_bounds[static_cast<std::size_t>(j)] == broil::lp::LowerBound::Free) {
            source.push_back(j);
            sign.push_back(-1.0);
        }
    }
    const MatrixXd eq = MatrixXd(lp.eq_matrix);
    MatrixXd in = MatrixXd(lp.ineq_matrix);
    VectorXd in_rhs = lp.ineq_rhs;
    if (!lp.upper_bounds.empty()) {
        for (Index j = 0; j < n; ++j) {
            const double ub = lp.upper_bounds[static_cast<std::size_t>(j)];
            if (!std::isfinite(ub)) continue;
            in.conservativeResize(in.rows() + 1, Eigen::NoChange);
            in.row(in.rows() - 1).setZero();
            in(in.rows() - 1, j) = 1.0;
            in_rhs.conservativeResize(in_rhs.size() + 1);
            in_rhs(in_rhs.size() - 1) = ub;
        }
    }
    const Index m_eq = eq.rows();
    const Index m_in = in.rows();
    const Index m = m_eq + m_in;
    const Index n_split = static_cast<Index>(source.size());
    const Index cols = n_split + m_in;

    MatrixXd a = MatrixXd::Zero(m, cols);
    VectorXd b(m);
    VectorXd c = VectorXd::Zero(cols);
    for (Index k = 0; k < n_split; ++k) {
        a.block(0, k, m_eq, 1) = sign[static_cast<std::size_t>(k)] * eq.col(source[static_cast<std::size_t>(k)]);
        a.block(m_eq, k, m_in, 1) = sign[static_cast<std::size_t>(k)] * in.col(source[static_cast<std::size_t>(k)]);
        c(k) = sign[static_cast<std::size_t>(k)] * lp.objective(source[static_cast<std::size_t>(k)]);
    }
    a.block(m_eq, n_split, m_in, m_in).setIdentity();
    b << lp.eq_rhs, in_rhs;

    VertexResult best;
    // Enumerate column subsets of size up to m; rank-deficient systems are handled by
    // least squares plus a residual check, which also covers redundant rows.
    std::vector<Index> chosen;
    auto consider = [&] {
        if (chosen.empty()) {
            if (b.size() == 0 || b.cwiseAbs().maxCoeff() <= 1e-9) {
                best.feasible = true;
                best.objective = std::min(best.objective, 0.0);
            }
            return;
        }
        MatrixXd sub(m, static_cast<Index>(chosen.size()));
        for (std::size_t k = 0; k < chosen.size(); ++k) sub.col(static_cast<Index>(k)) = a.col(chosen[k]);
        Eigen::ColPivHouseholderQR<MatrixXd> qr(sub);
        if (qr.rank() < static_cast<Index>(chosen.size())) return;
        const VectorXd xb = qr.solve(b);
        if ((sub * xb - b).cwiseAbs().maxCoeff() > 1e-9) return;
        if (xb.size() && xb.minCoeff() < -1e-9) return;
        double obj = 0.0;
        for (std::size_t k = 0; k < chosen.size(); ++k) obj += c(chosen[k]) * xb(static_cast<Index>(k));
        best.feasible = true;
        best.objective = std::min(best.objective, obj);
    };
    auto recurse = [&](auto&& self, Index start) -> void {
        consider();
        if (static_cast<Index>(chosen.size()) == m) return;
        for (Index j = start; j < cols; ++j) {
            chosen.push_back(j);
            self(self, j + 1);
            chosen.pop_back();
        }
    };
    recurse(recurse, 0);
    return best;
}

// ---------------------------------------------------------------------------
// Policy evaluation by a direct linear solve.
// ---------------------------------------------------------------------------

inline VectorXd evaluate_policy_values(const broil::TabularMDP& mdp, const broil::StochasticPolicy& pi,
                                       const VectorXd& reward) {
    const Index S = mdp.num_states;
    MatrixXd p_pi = MatrixXd::Zero(S, S);
    VectorXd r_pi = VectorXd::Zero(S);
    for (Index a = 0; a < mdp.num_actions; ++a) {
        for (Index s = 0; s < S; ++s) {
            p_pi.row(s) += pi.probs(s, a) * mdp.transitions[static_cast<std::size_t>(a)].row(s);
            r_pi(s) += pi.probs(s, a) * reward(a * S + s);
        }
    }
    return (MatrixXd::Identity(S, S) - mdp.gamma * p_pi).fullPivLu().solve(r_pi);
}

// ---------------------------------------------------------------------------
// MaxEnt trajectory enumeration over all (state, action) sequences of length H,
// normalized separately for each start state. Returns sum_s p0(s) log Z(s) and
// discounted expected state-action counts.
// ---------------------------------------------------------------------------

struct TrajectoryOracle {
    double log_partition = 0.0;
    VectorXd counts;
};

inline TrajectoryOracle enumerate_trajectories(const broil::TabularMDP& mdp, const VectorXd& reward, double beta,
                                               std::size_t horizon) {
    const Index S = mdp.num_states;
    const Index A = mdp.num_actions;
    std::vector<double> weights;
    std::vector<VectorXd> visits;
    std::vector<Index> states;
    std::vector<Index> actions;
    auto recurse = [&](auto&& self, double prob, double ret) -> void {
        const std::size_t t = actions.size();
        if (t == horizon) {
            VectorXd v = VectorXd::Zero(S * A);
            double discount = 1.0;
            for (std::size_t k = 0; k < horizon; ++k) {
                v(actions[k] * S + states[k]) += discount;
                discount *= mdp.gamma;
            }
            weights.push_back(prob * std::exp(beta * ret));
            visits.push_back(v);
            return;
        }
        const Index s = states.back();
        const double discount = std::pow(mdp.gamma, static_cast<double>(t));
        for (Index a = 0; a < A; ++a) {
            actions.push_back(a);
            const double r = ret + discount * reward(a * S + s);
            if (t + 1 == horizon) {
                self(self, prob, r);
            } else {
                for (Index next = 0; next < S; ++next) {
                    const double p = mdp.transitions[static_cast<std::size_t>(a)](s, next);
                    if (p == 0.0) continue;
                    states.push_back(next);
                    self(self, prob * p, r);
                    states.pop_back();
                }
            }
            actions.pop_back();
        }
    };
    TrajectoryOracle out;
    out.counts = VectorXd::Zero(S * A);
    for (Index s = 0; s < S; ++s) {
        if (mdp.p0(s) == 0.0) continue;
        weights.clear();
        visits.clear();
        states.push_back(s);
        recurse(recurse, 1.0, 0.0);
        states.pop_back();
        const double z = std::accumulate(weights.begin(), weights.end(), 0.0);
        out.log_partition += mdp.p0(s) * std::log(z);
        for (std::size_t i = 0; i < weights.size(); ++i) out.counts += mdp.p0(s) * weights[i] / z * visits[i];
    }
    return out;
}

} // namespace testing
