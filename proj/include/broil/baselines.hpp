#pragma once

#include "broil/mdp.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace broil {

// ---------------------------------------------------------------------------
// Maximum entropy IRL
//
// Given its start state, a trajectory of fixed horizon H is distributed as
//
//     Pr(xi | s_0) = prod_t P(s_{t+1} | s_t, a_t) exp(beta sum_{t<H} gamma^t r(s_t, a_t)) / Z(s_0)
//
// with r = Phi w and s_0 ~ p0. Visitation counts are discounted by gamma^t so
// they are comparable with discounted empirical feature counts. The forward
// pass pushes state mass through P itself, so the counts are exact for
// deterministic dynamics.
// ---------------------------------------------------------------------------

struct MaxEntConfig {
    double beta = 10.0;
    double learning_rate = 0.01;
    std::size_t horizon = 0; ///< 0 means "number of states"
    double convergence_eps = 1e-5;
    std::size_t max_iters = 10000;
    std::uint64_t seed = 0;
};

struct MaxEntResult {
    VectorXd weights;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Result of the soft backward pass.
struct SoftBackwardPass {
    std::vector<MatrixXd> policies; ///< policies[t] is the S x A local policy at step t
    VectorXd start_log_partition;   ///< log Z(s_0) per start state
    double log_partition = 0.0;     ///< sum_s p0(s) log Z(s)
};

SoftBackwardPass maxent_backward_pass(const TabularMDP& mdp, const VectorXd& w, double beta, std::size_t horizon);

/// Expected discounted state-action visitation (length S*A) of the MaxEnt trajectory distribution.
VectorXd maxent_expected_state_action_counts(const TabularMDP& mdp, const VectorXd& w, double beta,
                                             std::size_t horizon);

/// w^T mu_E - log_partition / beta; its gradient is mu_E - Phi^T counts(w).
double maxent_objective(const TabularMDP& mdp, const VectorXd& mu_expert, const VectorXd& w, double beta,
                        std::size_t horizon);

/// Stationary policy used to act with learned weights: the first-step local policy.
StochasticPolicy maxent_policy(const TabularMDP& mdp, const VectorXd& w, double beta, std::size_t horizon);

/// Projected gradient ascent on the unit sphere. Starts from `initial` if given, else a seeded random direction.
MaxEntResult maxent_irl(const TabularMDP& mdp, std::span<const Demonstration> demos, const MaxEntConfig& config,
                        std::optional<VectorXd> initial = std::nullopt);

// ---------------------------------------------------------------------------
// LPAL with sign-free weights (||w||_1 <= 1), i.e. minimize ||Phi^T u - mu_E||_inf.
// ---------------------------------------------------------------------------

struct LpalResult {
    StochasticPolicy policy;
    OccupancyVector u;
    double b_star = 0.0;
};

LpalResult lpal(const TabularMDP& mdp, const VectorXd& mu_expert);

} // namespace broil
