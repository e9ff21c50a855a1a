#pragma once

#include "broil/lp.hpp"
#include "broil/mdp.hpp"
#include "broil/posterior.hpp"
#include "broil/risk.hpp"

#include <span>
#include <variant>
#include <vector>

/**
 * Soft-robust policy optimization under a finite reward posterior.
 *
 * For a performance measure psi(u, R_i) that is affine in the occupancy u,
 * the policy maximizing
 *
 *     lambda * E[psi] + (1 - lambda) * CVaR_alpha[psi]
 *
 * is found by one linear program over (u, z, sigma):
 *
 *     min   -lambda p^T R^T u - (1 - lambda) sigma + (1 - lambda)/(1 - alpha) p^T z
 *     s.t.  sigma 1 - R^T u - z <= -b        (b = per-sample baseline return)
 *           sum_a (I - gamma P_a^T) u^a = p0
 *           u >= 0, z >= 0, sigma free
 *
 * The constant -lambda p^T b is kept out of the LP and added back when the
 * objective is reported.
 *
 * solve_broil works on the dual of that program by default:
 *
 *     min   p0^T v - b^T q
 *     s.t.  -F^T v + R q <= -lambda R p       (one row per state-action pair)
 *           1^T q = 1 - lambda
 *           0 <= q_i <= (1 - lambda) p_i / (1 - alpha),   v free
 *
 * where F is the flow matrix. Its row count is S*A + 1 whatever the number of
 * posterior samples, and u is read back from the multipliers of the
 * state-action rows (sigma from the multiplier of the sum row).
 */
namespace broil {

/// psi = R^T u
struct RobustObjective {};
/// psi = R^T (u - u_E)
struct BaselineRegretOccupancy {
    VectorXd expert_occupancy;
};
/// psi = R^T u - W^T mu_E; needs posterior weights.
struct BaselineRegretFeatures {
    VectorXd expert_feature_counts;
};
using ObjectiveKind = std::variant<RobustObjective, BaselineRegretOccupancy, BaselineRegretFeatures>;

/// Per-sample baseline return b_i (zero for the robust objective).
VectorXd baseline_returns(const RewardPosterior& posterior, const ObjectiveKind& kind);

/// psi_i = R_i^T u - b_i for every posterior sample.
VectorXd evaluate_psi(const OccupancyVector& u, const RewardPosterior& posterior, const ObjectiveKind& kind);

/// Flow-constraint rows sum_a (I - gamma P_a^T) u^a, with u in columns [0, S*A) of a wider LP.
lp::SparseMatrix flow_matrix(const TabularMDP& mdp, Eigen::Index num_variables);

lp::StandardFormLP build_broil_lp(const TabularMDP& mdp, const RewardPosterior& posterior, double alpha,
                                  double lambda, const ObjectiveKind& kind);

/// Dual program above, with variable blocks "v" (S, free) and "q" (N, boxed).
lp::StandardFormLP build_broil_dual_lp(const TabularMDP& mdp, const RewardPosterior& posterior, double alpha,
                                       double lambda, const ObjectiveKind& kind);

enum class BroilFormulation { Dual, Primal };

struct BroilSolution {
    OccupancyVector u;
    double sigma_star = 0.0;
    double objective_value = 0.0; ///< from the LP, constants re-added
    double expected_psi = 0.0;    ///< recomputed from u
    double cvar_psi = 0.0;        ///< recomputed from u by cvar_alpha
    StochasticPolicy policy;
    VectorXd psi;
    std::size_t lp_iterations = 0;
};

BroilSolution solve_broil(const TabularMDP& mdp, const RewardPosterior& posterior, double alpha, double lambda,
                          const ObjectiveKind& kind, const lp::SimplexOptions& options = {},
                          BroilFormulation formulation = BroilFormulation::Dual);

struct FrontierPoint {
    double lambda = 0.0;
    double expected_psi = 0.0;
    double cvar_psi = 0.0;
    double sigma_star = 0.0;
};

std::vector<FrontierPoint> frontier(const TabularMDP& mdp, const RewardPosterior& posterior, double alpha,
                                    std::span<const double> lambdas, const ObjectiveKind& kind);

struct MaxReturnSolution {
    OccupancyVector u;
    double value = 0.0;
    StochasticPolicy policy;
};

/// Classic occupancy LP: max r^T u subject to the flow constraints.
MaxReturnSolution solve_max_return(const TabularMDP& mdp, const VectorXd& reward);

} // namespace broil
