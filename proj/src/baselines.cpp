#include "broil/baselines.hpp"

#include "broil/broil.hpp"
#include "broil/lp.hpp"
#include "broil/posterior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace broil {

namespace {

std::size_t effective_horizon(const TabularMDP& mdp, std::size_t horizon) {
    return horizon == 0 ? static_cast<std::size_t>(mdp.num_states) : horizon;
}

double log_sum_exp(const Eigen::Ref<const VectorXd>& v) {
    const double top = v.maxCoeff();
    if (top == -std::numeric_limits<double>::infinity()) return top;
    return top + std::log((v.array() - top).exp().sum());
}

} // namespace

SoftBackwardPass maxent_backward_pass(const TabularMDP& mdp, const VectorXd& w, double beta, std::size_t horizon) {
    if (w.size() != mdp.num_features()) throw std::invalid_argument("maxent: weight dimension mismatch");
    horizon = effective_horizon(mdp, horizon);
    const auto S = mdp.num_states;
    const auto A = mdp.num_actions;
    const VectorXd reward = mdp.features * w;

    SoftBackwardPass pass;
    pass.policies.resize(horizon);
    VectorXd next_value = VectorXd::Zero(S); // log partition of the remaining steps
    VectorXd value(S);
    MatrixXd q(S, A);
    for (std::size_t t = horizon; t-- > 0;) {
        const double discount = std::pow(mdp.gamma, static_cast<double>(t));
        for (Eigen::Index a = 0; a < A; ++a) {
            const auto& p = mdp.transitions[static_cast<std::size_t>(a)];
            for (Eigen::Index s = 0; s < S; ++s) {
                // log sum_s' P(s'|s,a) exp(V(s')) over the support of the row
                double top = -std::numeric_limits<double>::infinity();
                for (Eigen::Index to = 0; to < S; ++to)
                    if (p(s, to) > 0.0) top = std::max(top, next_value(to));
                double acc = 0.0;
                for (Eigen::Index to = 0; to < S; ++to)
                    if (p(s, to) > 0.0) acc += p(s, to) * std::exp(next_value(to) - top);
                q(s, a) = beta * discount * reward(sa_index(s, a, S)) + top + std::log(acc);
            }
        }
        for (Eigen::Index s = 0; s < S; ++s) value(s) = log_sum_exp(q.row(s).transpose());
        pass.policies[t] = (q.colwise() - value).array().exp().matrix();
        next_value = value;
    }
    pass.start_log_partition = next_value;
    pass.log_partition = 0.0;
    for (Eigen::Index s = 0; s < S; ++s)
        if (mdp.p0(s) > 0.0) pass.log_partition += mdp.p0(s) * next_value(s);
    return pass;
}

VectorXd maxent_expected_state_action_counts(const TabularMDP& mdp, const VectorXd& w, double beta,
                                             std::size_t horizon) {
    horizon = effective_horizon(mdp, horizon);
    const auto pass = maxent_backward_pass(mdp, w, beta, horizon);
    const auto S = mdp.num_states;
    const auto A = mdp.num_actions;

    VectorXd counts = VectorXd::Zero(mdp.num_pairs());
    VectorXd state_dist = mdp.p0;
    double discount = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        VectorXd next = VectorXd::Zero(S);
        for (Eigen::Index a = 0; a < A; ++a) {
            const VectorXd flow = state_dist.cwiseProduct(pass.policies[t].col(a));
            counts.segment(a * S, S) += discount * flow;
            next += mdp.transitions[static_cast<std::size_t>(a)].transpose() * flow;
        }
        state_dist = next;
        discount *= mdp.gamma;
    }
    return counts;
}

double maxent_objective(const TabularMDP& mdp, const VectorXd& mu_expert, const VectorXd& w, double beta,
                        std::size_t horizon) {
    if (!(beta > 0.0)) throw std::invalid_argument("maxent_objective: beta must be positive");
    return w.dot(mu_expert) - maxent_backward_pass(mdp, w, beta, horizon).log_partition / beta;
}

StochasticPolicy maxent_policy(const TabularMDP& mdp, const VectorXd& w, double beta, std::size_t horizon) {
    return {maxent_backward_pass(mdp, w, beta, horizon).policies.front()};
}

MaxEntResult maxent_irl(const TabularMDP& mdp, std::span<const Demonstration> demos, const MaxEntConfig& config,
                        std::optional<VectorXd> initial) {
    if (demos.empty()) throw std::invalid_argument("maxent_irl: no demonstrations");
    if (!(config.beta > 0.0) || !(config.learning_rate >= 0.0) || !(config.convergence_eps > 0.0) ||
        config.max_iters == 0)
        throw std::invalid_argument("maxent_irl: invalid configuration");

    const VectorXd mu_expert = empirical_expert_feature_counts(demos, mdp);
    MaxEntResult result;
    if (initial) {
        if (initial->size() != mdp.num_features() || initial->norm() == 0.0)
            throw std::invalid_argument("maxent_irl: initial weights must be a nonzero length-k vector");
        result.weights = initial->normalized();
    } else {
        Rng rng(config.seed);
        result.weights = random_unit_vector(mdp.num_features(), rng);
    }

    while (result.iterations < config.max_iters) {
        const VectorXd counts = maxent_expected_state_action_counts(mdp, result.weights, config.beta, config.horizon);
        const VectorXd gradient = mu_expert - mdp.features.transpose() * counts;
        VectorXd updated = result.weights + config.learning_rate * gradient;
        if (updated.norm() > 0.0) updated.normalize();
        ++result.iterations;
        const double change = (updated - result.weights).norm();
        result.weights = updated;
        if (change < config.convergence_eps) {
            result.converged = true;
            break;
        }
    }
    return result;
}

LpalResult lpal(const TabularMDP& mdp, const VectorXd& mu_expert) {
    mdp.validate();
    const auto k = mdp.num_features();
    if (mu_expert.size() != k) throw std::invalid_argument("lpal: expert feature counts must have length k");
    const auto num_pairs = mdp.num_pairs();
    const auto b_index = num_pairs;
    const auto num_vars = num_pairs + 1;

    lp::StandardFormLP lp;
    lp.objective = VectorXd::Zero(num_vars);
    lp.objective(b_index) = 1.0;
    lp.eq_matrix = flow_matrix(mdp, num_vars);
    lp.eq_rhs = mdp.p0;

    //  Phi^T u - B <=  mu_E
    // -Phi^T u - B <= -mu_E
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index f = 0; f < k; ++f) {
        for (Eigen::Index j = 0; j < num_pairs; ++j) {
            const double phi = mdp.features(j, f);
            if (phi == 0.0) continue;
            triplets.emplace_back(f, j, phi);
            triplets.emplace_back(k + f, j, -phi);
        }
        triplets.emplace_back(f, b_index, -1.0);
        triplets.emplace_back(k + f, b_index, -1.0);
    }
    lp.ineq_matrix.resize(2 * k, num_vars);
    lp.ineq_matrix.setFromTriplets(triplets.begin(), triplets.end());
    lp.ineq_rhs.resize(2 * k);
    lp.ineq_rhs << mu_expert, -mu_expert;
    lp.lower_bounds.assign(static_cast<std::size_t>(num_vars), lp::LowerBound::Zero);
    lp.lower_bounds.back() = lp::LowerBound::Free;
    lp.variable_map = {{"u", 0, num_pairs}, {"B", b_index, 1}};

    const auto sol = lp::solve_lp(lp);
    if (sol.status != lp::LpStatus::Optimal)
        throw lp::SolverError("lpal: LP solve ended with status " + std::string(lp::to_string(sol.status)));

    LpalResult result;
    result.u = OccupancyVector{lp.slice(sol.x, "u")};
    result.b_star = sol.x(b_index);
    result.policy = extract_policy(result.u, mdp);
    return result;
}

} // namespace broil
