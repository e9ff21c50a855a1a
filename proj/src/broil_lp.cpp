#include "broil/broil.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace broil {

namespace {

void check_parameters(double alpha, double lambda) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("broil: alpha must lie in [0, 1)");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("broil: lambda must lie in [0, 1]");
}

void require_optimal(const lp::LpSolution& sol, const char* what) {
    if (sol.status != lp::LpStatus::Optimal)
        throw lp::SolverError(std::string(what) + ": LP solve ended with status " +
                              std::string(lp::to_string(sol.status)));
}

} // namespace

VectorXd baseline_returns(const RewardPosterior& posterior, const ObjectiveKind& kind) {
    const auto n = posterior.size();
    if (std::holds_alternative<RobustObjective>(kind)) return VectorXd::Zero(n);
    if (const auto* occ = std::get_if<BaselineRegretOccupancy>(&kind)) {
        if (occ->expert_occupancy.size() != posterior.rewards.rows())
            throw std::invalid_argument("broil: expert occupancy must have length S*A");
        return posterior.rewards.transpose() * occ->expert_occupancy;
    }
    const auto& feat = std::get<BaselineRegretFeatures>(kind);
    if (!posterior.weights)
        throw std::invalid_argument("broil: feature-count baseline needs a posterior with weight samples");
    if (feat.expert_feature_counts.size() != posterior.weights->rows())
        throw std::invalid_argument("broil: expert feature counts must have length k");
    return posterior.weights->transpose() * feat.expert_feature_counts;
}

VectorXd evaluate_psi(const OccupancyVector& u, const RewardPosterior& posterior, const ObjectiveKind& kind) {
    if (u.values.size() != posterior.rewards.rows()) throw std::invalid_argument("broil: occupancy length mismatch");
    return posterior.rewards.transpose() * u.values - baseline_returns(posterior, kind);
}

lp::SparseMatrix flow_matrix(const TabularMDP& mdp, Eigen::Index num_variables) {
    const auto S = mdp.num_states;
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index a = 0; a < mdp.num_actions; ++a) {
        const auto& p = mdp.transitions[static_cast<std::size_t>(a)];
        for (Eigen::Index from = 0; from < S; ++from) {
            const auto col = sa_index(from, a, S);
            // Column (from, a) of I - gamma P_a^T: +1 at row `from`, -gamma P_a(from, to) at row `to`.
            double diagonal = 1.0;
            for (Eigen::Index to = 0; to < S; ++to) {
                const double prob = p(from, to);
                if (prob == 0.0) continue;
                if (to == from)
                    diagonal -= mdp.gamma * prob;
                else
                    triplets.emplace_back(to, col, -mdp.gamma * prob);
            }
            triplets.emplace_back(from, col, diagonal);
        }
    }
    lp::SparseMatrix flow(S, num_variables);
    flow.setFromTriplets(triplets.begin(), triplets.end());
    return flow;
}

lp::StandardFormLP build_broil_lp(const TabularMDP& mdp, const RewardPosterior& posterior, double alpha,
                                  double lambda, const ObjectiveKind& kind) {
    check_parameters(alpha, lambda);
    mdp.validate();
    posterior.validate(mdp);

    const auto num_pairs = mdp.num_pairs();
    const auto n = posterior.size();
    const auto z_offset = num_pairs;
    const auto sigma_index = num_pairs + n;
    const auto num_vars = sigma_index + 1;
    const VectorXd& p = posterior.probs;
    const VectorXd baseline = baseline_returns(posterior, kind);

    lp::StandardFormLP lp;
    lp.objective = VectorXd::Zero(num_vars);
    lp.objective.head(num_pairs) = -lambda * (posterior.rewards * p);
    lp.objective.segment(z_offset, n) = (1.0 - lambda) / (1.0 - alpha) * p;
    lp.objective(sigma_index) = -(1.0 - lambda);

    lp.eq_matrix = flow_matrix(mdp, num_vars);
    lp.eq_rhs = mdp.p0;

    // sigma - R_i^T u - z_i <= -b_i
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n * (num_pairs + 2)));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < num_pairs; ++j) {
            const double r = posterior.rewards(j, i);
            if (r != 0.0) triplets.emplace_back(i, j, -r);
        }
        triplets.emplace_back(i, z_offset + i, -1.0);
        triplets.emplace_back(i, sigma_index, 1.0);
    }
    lp.ineq_matrix.resize(n, num_vars);
    lp.ineq_matrix.setFromTriplets(triplets.begin(), triplets.end());
    lp.ineq_rhs = -baseline;

    lp.lower_bounds.assign(static_cast<std::size_t>(num_vars), lp::LowerBound::Zero);
    lp.lower_bounds.back() = lp::LowerBound::Free;
    lp.variable_map = {{"u", 0, num_pairs}, {"z", z_offset, n}, {"sigma", sigma_index, 1}};
    return lp;
}

lp::StandardFormLP build_broil_dual_lp(const TabularMDP& mdp, const RewardPosterior& posterior, double alpha,
                                       double lambda, const ObjectiveKind& kind) {
    check_parameters(alpha, lambda);
    mdp.validate();
    posterior.validate(mdp);

    const auto S = mdp.num_states;
    const auto num_pairs = mdp.num_pairs();
    const auto n = posterior.size();
    const auto num_vars = S + n;
    const VectorXd& p = posterior.probs;

    lp::StandardFormLP lp;
    lp.objective.resize(num_vars);
    lp.objective << mdp.p0, -baseline_returns(posterior, kind);

    // -F^T v + R q <= -lambda R p
    const lp::SparseMatrix flow = flow_matrix(mdp, num_pairs);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(flow.nonZeros() + n * num_pairs));
    for (Eigen::Index j = 0; j < num_pairs; ++j)
        for (lp::SparseMatrix::InnerIterator it(flow, j); it; ++it) triplets.emplace_back(j, it.row(), -it.value());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < num_pairs; ++j) {
            const double r = posterior.rewards(j, i);
            if (r != 0.0) triplets.emplace_back(j, S + i, r);
        }
    lp.ineq_matrix.resize(num_pairs, num_vars);
    lp.ineq_matrix.setFromTriplets(triplets.begin(), triplets.end());
    lp.ineq_rhs = -lambda * (posterior.rewards * p);

    lp.eq_matrix.resize(1, num_vars);
    std::vector<Eigen::Triplet<double>> ones;
    for (Eigen::Index i = 0; i < n; ++i) ones.emplace_back(0, S + i, 1.0);
    lp.eq_matrix.setFromTriplets(ones.begin(), ones.end());
    lp.eq_rhs = VectorXd::Constant(1, 1.0 - lambda);

    lp.lower_bounds.assign(static_cast<std::size_t>(num_vars), lp::LowerBound::Zero);
    std::fill_n(lp.lower_bounds.begin(), S, lp::LowerBound::Free);
    lp.upper_bounds.assign(static_cast<std::size_t>(num_vars), std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < n; ++i)
        lp.upper_bounds[static_cast<std::size_t>(S + i)] = (1.0 - lambda) * p(i) / (1.0 - alpha);
    lp.variable_map = {{"v", 0, S}, {"q", S, n}};
    return lp;
}

BroilSolution solve_broil(const TabularMDP& mdp, const RewardPosterior& posterior, double alpha, double lambda,
                          const ObjectiveKind& kind, const lp::SimplexOptions& options,
                          BroilFormulation formulation) {
    BroilSolution out;
    double lp_sigma = 0.0;
    double lp_value = 0.0;
    if (formulation == BroilFormulation::Primal) {
        const auto lp = build_broil_lp(mdp, posterior, alpha, lambda, kind);
        const auto sol = lp::solve_lp(lp, options);
        require_optimal(sol, "solve_broil");
        out.u = OccupancyVector{lp.slice(sol.x, "u")};
        out.lp_iterations = sol.iterations;
        lp_value = -sol.objective;
        lp_sigma = lp.slice(sol.x, "sigma")(0);
    } else {
        const auto lp = build_broil_dual_lp(mdp, posterior, alpha, lambda, kind);
        const auto sol = lp::solve_lp(lp, options);
        require_optimal(sol, "solve_broil");
        // Multipliers of the <= rows are nonpositive; u is their negation.
        out.u = OccupancyVector{(-sol.ineq_duals).cwiseMax(0.0)};
        out.lp_iterations = sol.iterations;
        lp_value = sol.objective;
        lp_sigma = sol.eq_duals(0);
    }
    out.objective_value = lp_value - lambda * posterior.probs.dot(baseline_returns(posterior, kind));

    // Risk statistics are recomputed from u alone, independently of z and sigma.
    out.psi = evaluate_psi(out.u, posterior, kind);
    const DiscreteDistribution dist{out.psi, posterior.probs};
    const auto cvar = cvar_alpha(dist, alpha);
    out.expected_psi = mean(dist);
    out.cvar_psi = cvar.cvar;

    // sigma carries no objective weight at lambda = 1 and may sit anywhere on a flat
    // piece; report the attained maximizer in that case.
    const double slack = 1e-9 * (1.0 + out.psi.cwiseAbs().maxCoeff());
    const bool in_range = lp_sigma >= out.psi.minCoeff() - slack && lp_sigma <= out.psi.maxCoeff() + slack;
    out.sigma_star = (lambda < 1.0 && in_range) ? lp_sigma : cvar.sigma_star;

    out.policy = extract_policy(out.u, mdp);
    return out;
}

std::vector<FrontierPoint> frontier(const TabularMDP& mdp, const RewardPosterior& posterior, double alpha,
                                    std::span<const double> lambdas, const ObjectiveKind& kind) {
    std::vector<FrontierPoint> points;
    points.reserve(lambdas.size());
    for (const double lambda : lambdas) {
        const auto sol = solve_broil(mdp, posterior, alpha, lambda, kind);
        points.push_back({lambda, sol.expected_psi, sol.cvar_psi, sol.sigma_star});
    }
    return points;
}

MaxReturnSolution solve_max_return(const TabularMDP& mdp, const VectorXd& reward) {
    mdp.validate();
    if (reward.size() != mdp.num_pairs()) throw std::invalid_argument("solve_max_return: reward must have length S*A");
    const auto num_pairs = mdp.num_pairs();

    lp::StandardFormLP lp;
    lp.objective = -reward;
    lp.eq_matrix = flow_matrix(mdp, num_pairs);
    lp.eq_rhs = mdp.p0;
    lp.ineq_matrix.resize(0, num_pairs);
    lp.ineq_rhs.resize(0);
    lp.lower_bounds.assign(static_cast<std::size_t>(num_pairs), lp::LowerBound::Zero);
    lp.variable_map = {{"u", 0, num_pairs}};

    const auto sol = lp::solve_lp(lp);
    require_optimal(sol, "solve_max_return");
    MaxReturnSolution out;
    out.u = OccupancyVector{sol.x};
    out.value = -sol.objective;
    out.policy = extract_policy(out.u, mdp);
    return out;
}

} // namespace broil
