#pragma once

#include "broil/mdp.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace broil {

/// Pseudo-random generator used everywhere a seed is accepted (64-bit Mersenne Twister).
using Rng = std::mt19937_64;

/**
 * A finite set of reward hypotheses with probability mass.
 *
 * Column i of `rewards` is the S*A reward vector of hypothesis i. When the
 * hypotheses are linear in the MDP features, `weights` holds the k x N
 * weight matrix with rewards = features * weights.
 */
struct RewardPosterior {
    std::optional<MatrixXd> weights;
    MatrixXd rewards;
    VectorXd probs;

    Eigen::Index size() const { return rewards.cols(); }
    VectorXd mean_reward() const { return rewards * probs; }

    void validate(const TabularMDP& mdp) const;
};

RewardPosterior posterior_from_samples(const MatrixXd& weights, const TabularMDP& mdp,
                                       std::optional<VectorXd> probs = std::nullopt);

// Per-entry prior distributions. Costs are represented as negative rewards.
struct ConstantPrior {
    double value = 0.0;
};
struct NormalPrior {
    double mean = 0.0;
    double stddev = 1.0; ///< zero gives a point mass
};
/// Reward = -X with X ~ Gamma(shape, scale).
struct NegatedGammaPrior {
    double shape = 1.0;
    double scale = 1.0;
};
using EntryPrior = std::variant<ConstantPrior, NormalPrior, NegatedGammaPrior>;

/// One independent prior per state-action entry, in sa_index order.
struct PriorSpec {
    std::vector<EntryPrior> entries;
};

void validate_prior(const EntryPrior& prior);

/// N i.i.d. reward vectors drawn entry by entry; the result has no weight matrix.
RewardPosterior sample_prior_posterior(const PriorSpec& spec, const TabularMDP& mdp, std::size_t num_samples,
                                       std::uint64_t seed);

struct BirlConfig {
    double beta = 10.0;
    double proposal_std = 0.2;
    std::size_t burn_in = 500;
    std::size_t skip = 5;
    std::size_t num_samples = 2000;
    std::uint64_t seed = 0;

    void validate() const;
    /// burn_in + skip * num_samples
    std::size_t total_proposals() const { return burn_in + skip * num_samples; }
};

struct BirlResult {
    RewardPosterior posterior;
    std::size_t proposals = 0;
    std::size_t accepted = 0;

    double accept_ratio() const {
        return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
    }
};

/// Boltzmann-rational log-likelihood of the demonstrations under reward Phi w.
double birl_log_likelihood(const TabularMDP& mdp, std::span<const Demonstration> demos, const VectorXd& w,
                           double beta);

/// Same likelihood from precomputed Q-values (S x A).
double boltzmann_log_likelihood(const MatrixXd& q, std::span<const Demonstration> demos, double beta);

/**
 * Metropolis-Hastings over unit-norm reward weights.
 *
 * Proposals add isotropic Gaussian noise and renormalize onto the unit
 * sphere. The acceptance test uses the plain likelihood ratio; the slight
 * asymmetry introduced by the renormalization is not corrected for.
 */
BirlResult birl_mcmc(const TabularMDP& mdp, std::span<const Demonstration> demos, const BirlConfig& config);

/// Uniformly distributed point on the unit sphere in R^dim.
VectorXd random_unit_vector(Eigen::Index dim, Rng& rng);

} // namespace broil
