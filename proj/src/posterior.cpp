#include "broil/posterior.hpp"

#include <cmath>
#include <stdexcept>

namespace broil {

namespace {

void check_probs(const VectorXd& probs, Eigen::Index n) {
    if (probs.size() != n) throw std::invalid_argument("posterior: probs length must equal the number of samples");
    if (probs.minCoeff() < 0.0 || std::abs(probs.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("posterior: probs is not a probability vector");
}

struct PriorDraw {
    Rng& rng;
    double operator()(const ConstantPrior& p) const { return p.value; }
    double operator()(const NormalPrior& p) const {
        if (p.stddev == 0.0) return p.mean;
        return std::normal_distribution<double>(p.mean, p.stddev)(rng);
    }
    double operator()(const NegatedGammaPrior& p) const {
        return -std::gamma_distribution<double>(p.shape, p.scale)(rng);
    }
};

} // namespace

void RewardPosterior::validate(const TabularMDP& mdp) const {
    if (rewards.cols() < 1) throw std::invalid_argument("posterior: no samples");
    if (rewards.rows() != mdp.num_pairs()) throw std::invalid_argument("posterior: rewards must have S*A rows");
    check_probs(probs, rewards.cols());
    if (weights) {
        if (weights->rows() != mdp.num_features() || weights->cols() != rewards.cols())
            throw std::invalid_argument("posterior: weights must be k x N");
    }
}

RewardPosterior posterior_from_samples(const MatrixXd& weights, const TabularMDP& mdp, std::optional<VectorXd> probs) {
    if (weights.rows() != mdp.num_features())
        throw std::invalid_argument("posterior_from_samples: weights must have k rows");
    if (weights.cols() < 1) throw std::invalid_argument("posterior_from_samples: no samples");
    const auto n = weights.cols();
    VectorXd p = probs ? *probs : VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    check_probs(p, n);
    return {weights, mdp.features * weights, std::move(p)};
}

void validate_prior(const EntryPrior& prior) {
    if (const auto* normal = std::get_if<NormalPrior>(&prior)) {
        if (!(normal->stddev >= 0.0) || !std::isfinite(normal->mean))
            throw std::invalid_argument("prior: normal stddev must be nonnegative");
    } else if (const auto* gamma = std::get_if<NegatedGammaPrior>(&prior)) {
        if (!(gamma->shape > 0.0) || !(gamma->scale > 0.0))
            throw std::invalid_argument("prior: gamma shape and scale must be positive");
    }
}

RewardPosterior sample_prior_posterior(const PriorSpec& spec, const TabularMDP& mdp, std::size_t num_samples,
                                       std::uint64_t seed) {
    if (static_cast<Eigen::Index>(spec.entries.size()) != mdp.num_pairs())
        throw std::invalid_argument("sample_prior_posterior: need one prior per state-action pair");
    if (num_samples == 0) throw std::invalid_argument("sample_prior_posterior: num_samples must be positive");
    for (const auto& entry : spec.entries) validate_prior(entry);

    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(num_samples);
    MatrixXd rewards(mdp.num_pairs(), n);
    PriorDraw draw{rng};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < mdp.num_pairs(); ++j)
            rewards(j, i) = std::visit(draw, spec.entries[static_cast<std::size_t>(j)]);
    return {std::nullopt, std::move(rewards), VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

void BirlConfig::validate() const {
    if (!(beta >= 0.0)) throw std::invalid_argument("birl: beta must be nonnegative");
    if (!(proposal_std > 0.0)) throw std::invalid_argument("birl: proposal_std must be positive");
    if (skip == 0) throw std::invalid_argument("birl: skip must be positive");
    if (num_samples == 0) throw std::invalid_argument("birl: num_samples must be positive");
}

double boltzmann_log_likelihood(const MatrixXd& q, std::span<const Demonstration> demos, double beta) {
    double total = 0.0;
    for (const auto& demo : demos) {
        for (const auto& [s, a] : demo.steps) {
            const auto row = q.row(s);
            const double top = beta * row.maxCoeff();
            const double log_norm = top + std::log((beta * row.array() - top).exp().sum());
            total += beta * row(a) - log_norm;
        }
    }
    return total;
}

double birl_log_likelihood(const TabularMDP& mdp, std::span<const Demonstration> demos, const VectorXd& w,
                           double beta) {
    if (w.size() != mdp.num_features()) throw std::invalid_argument("birl_log_likelihood: weight dimension mismatch");
    for (const auto& demo : demos)
        for (const auto& [s, a] : demo.steps)
            if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions)
                throw std::invalid_argument("birl_log_likelihood: demonstration index out of range");
    return boltzmann_log_likelihood(q_values(mdp, mdp.features * w), demos, beta);
}

VectorXd random_unit_vector(Eigen::Index dim, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd v(dim);
    do {
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
    } while (v.norm() == 0.0);
    return v.normalized();
}

BirlResult birl_mcmc(const TabularMDP& mdp, std::span<const Demonstration> demos, const BirlConfig& config) {
    config.validate();
    if (demos.empty()) throw std::invalid_argument("birl_mcmc: no demonstrations");

    Rng rng(config.seed);
    std::normal_distribution<double> noise(0.0, config.proposal_std);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const auto k = mdp.num_features();
    VectorXd current = random_unit_vector(k, rng);
    double current_ll = birl_log_likelihood(mdp, demos, current, config.beta);

    const auto n = static_cast<Eigen::Index>(config.num_samples);
    MatrixXd samples(k, n);
    Eigen::Index kept = 0;
    BirlResult result;

    VectorXd proposal(k);
    for (std::size_t step = 0; step < config.total_proposals(); ++step) {
        do {
            for (Eigen::Index i = 0; i < k; ++i) proposal(i) = current(i) + noise(rng);
        } while (proposal.norm() == 0.0);
        proposal.normalize();

        const double proposal_ll = birl_log_likelihood(mdp, demos, proposal, config.beta);
        ++result.proposals;
        if (std::log(uniform(rng)) < proposal_ll - current_ll) {
            current = proposal;
            current_ll = proposal_ll;
            ++result.accepted;
        }
        if (step >= config.burn_in && (step - config.burn_in + 1) % config.skip == 0) samples.col(kept++) = current;
    }

    result.posterior = posterior_from_samples(samples, mdp);
    return result;
}

} // namespace broil
