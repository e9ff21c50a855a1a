#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

/**
 * Tabular MDP primitives shared by every solver in the library.
 *
 * State-action vectors (rewards, occupancies, feature rows) use the
 * action-major layout
 *
 *     index(s, a) = a * S + s
 *
 * so that the first S entries belong to action 0, the next S to action 1,
 * and so on. `sa_index` is the only place this convention is spelled out;
 * everything else goes through it.
 */
namespace broil {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Flattened index of the pair (state, action) in an S*A vector.
inline Eigen::Index sa_index(Eigen::Index state, Eigen::Index action, Eigen::Index num_states) {
    return action * num_states + state;
}

/**
 * Finite MDP with linear reward features.
 *
 * transitions[a](s, s') is the probability of moving from s to s' under a.
 * features is (S*A) x k with rows in sa_index order.
 */
struct TabularMDP {
    Eigen::Index num_states = 0;
    Eigen::Index num_actions = 0;
    std::vector<MatrixXd> transitions;
    double gamma = 0.0;
    VectorXd p0;
    MatrixXd features;

    Eigen::Index num_pairs() const { return num_states * num_actions; }
    Eigen::Index num_features() const { return features.cols(); }

    /// Throws std::invalid_argument if any structural or stochasticity invariant is violated.
    void validate() const;
};

struct StochasticPolicy {
    MatrixXd probs; ///< S x A, rows sum to one
};

struct OccupancyVector {
    VectorXd values; ///< length S*A, discounted state-action visitation
};

/// One trajectory of (state, action) pairs; step t carries discount gamma^t.
struct Demonstration {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> steps;
};

/// Occupancy mass below this is treated as an unreachable state by extract_policy.
inline constexpr double kUnreachableMass = 1e-10;

OccupancyVector occupancy_from_policy(const TabularMDP& mdp, const StochasticPolicy& policy);

/// Normalizes occupancies per state; unreachable states get the uniform distribution.
StochasticPolicy extract_policy(const OccupancyVector& u, const TabularMDP& mdp);

double expected_return(const OccupancyVector& u, const VectorXd& reward);

/// mu = Phi^T u.
VectorXd feature_counts(const OccupancyVector& u, const TabularMDP& mdp);

/// Discounted feature counts averaged over trajectories; discount restarts at each trajectory.
VectorXd empirical_expert_feature_counts(std::span<const Demonstration> demos, const TabularMDP& mdp);

/// Optimal Q-values for a state-action reward by value iteration.
MatrixXd q_values(const TabularMDP& mdp, const VectorXd& reward, double tolerance = 1e-10);

/// Left-hand side of the Bellman flow constraints, sum_a (I - gamma P_a^T) u^a.
VectorXd flow_residual_lhs(const TabularMDP& mdp, const VectorXd& u);

/// Greedy deterministic policy with respect to Q (lowest action index wins ties).
StochasticPolicy greedy_policy(const MatrixXd& q);

StochasticPolicy uniform_policy(const TabularMDP& mdp);

} // namespace broil
