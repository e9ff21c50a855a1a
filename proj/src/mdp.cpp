#include "broil/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace broil {

namespace {

constexpr double kStochasticTol = 1e-9;

void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

} // namespace

void TabularMDP::validate() const {
    require(num_states > 0, "mdp: num_states must be positive");
    require(num_actions > 0, "mdp: num_actions must be positive");
    require(gamma >= 0.0 && gamma < 1.0, "mdp: gamma must lie in [0, 1)");
    require(static_cast<Eigen::Index>(transitions.size()) == num_actions,
            "mdp: expected one transition matrix per action");
    for (std::size_t a = 0; a < transitions.size(); ++a) {
        const auto& p = transitions[a];
        require(p.rows() == num_states && p.cols() == num_states,
                "mdp: transition matrix " + std::to_string(a) + " must be S x S");
        require(p.minCoeff() >= 0.0, "mdp: negative transition probability for action " + std::to_string(a));
        for (Eigen::Index s = 0; s < num_states; ++s) {
            require(std::abs(p.row(s).sum() - 1.0) <= kStochasticTol,
                    "mdp: transition row (a=" + std::to_string(a) + ", s=" + std::to_string(s) +
                        ") does not sum to 1");
        }
    }
    require(p0.size() == num_states, "mdp: p0 must have length S");
    require(p0.minCoeff() >= 0.0, "mdp: p0 has negative entries");
    require(std::abs(p0.sum() - 1.0) <= kStochasticTol, "mdp: p0 does not sum to 1");
    require(features.rows() == num_pairs(), "mdp: features must have S*A rows");
    require(features.cols() >= 1, "mdp: features must have at least one column");
}

OccupancyVector occupancy_from_policy(const TabularMDP& mdp, const StochasticPolicy& policy) {
    const auto S = mdp.num_states;
    const auto A = mdp.num_actions;
    if (policy.probs.rows() != S || policy.probs.cols() != A)
        throw std::invalid_argument("occupancy_from_policy: policy must be S x A");

    MatrixXd p_pi = MatrixXd::Zero(S, S);
    for (Eigen::Index a = 0; a < A; ++a)
        p_pi += policy.probs.col(a).asDiagonal() * mdp.transitions[a];

    const MatrixXd system = MatrixXd::Identity(S, S) - mdp.gamma * p_pi.transpose();
    Eigen::PartialPivLU<MatrixXd> lu(system);
    const VectorXd d = lu.solve(mdp.p0);
    if (!d.allFinite()) throw std::runtime_error("occupancy_from_policy: linear solve failed");

    OccupancyVector u{VectorXd(mdp.num_pairs())};
    for (Eigen::Index a = 0; a < A; ++a)
        for (Eigen::Index s = 0; s < S; ++s) u.values(sa_index(s, a, S)) = policy.probs(s, a) * d(s);
    return u;
}

StochasticPolicy extract_policy(const OccupancyVector& u, const TabularMDP& mdp) {
    const auto S = mdp.num_states;
    const auto A = mdp.num_actions;
    if (u.values.size() != mdp.num_pairs()) throw std::invalid_argument("extract_policy: dimension mismatch");

    StochasticPolicy policy{MatrixXd(S, A)};
    for (Eigen::Index s = 0; s < S; ++s) {
        double total = 0.0;
        for (Eigen::Index a = 0; a < A; ++a) total += std::max(0.0, u.values(sa_index(s, a, S)));
        for (Eigen::Index a = 0; a < A; ++a) {
            policy.probs(s, a) = total < kUnreachableMass
                                     ? 1.0 / static_cast<double>(A)
                                     : std::max(0.0, u.values(sa_index(s, a, S))) / total;
        }
    }
    return policy;
}

double expected_return(const OccupancyVector& u, const VectorXd& reward) {
    if (u.values.size() != reward.size()) throw std::invalid_argument("expected_return: dimension mismatch");
    return u.values.dot(reward);
}

VectorXd feature_counts(const OccupancyVector& u, const TabularMDP& mdp) {
    if (u.values.size() != mdp.features.rows()) throw std::invalid_argument("feature_counts: dimension mismatch");
    return mdp.features.transpose() * u.values;
}

VectorXd empirical_expert_feature_counts(std::span<const Demonstration> demos, const TabularMDP& mdp) {
    if (demos.empty()) throw std::invalid_argument("empirical_expert_feature_counts: no demonstrations");
    VectorXd mu = VectorXd::Zero(mdp.num_features());
    for (const auto& demo : demos) {
        if (demo.steps.empty()) throw std::invalid_argument("empirical_expert_feature_counts: empty demonstration");
        double discount = 1.0;
        for (const auto& [s, a] : demo.steps) {
            if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions)
                throw std::invalid_argument("empirical_expert_feature_counts: index out of range");
            mu += discount * mdp.features.row(sa_index(s, a, mdp.num_states)).transpose();
            discount *= mdp.gamma;
        }
    }
    return mu / static_cast<double>(demos.size());
}

MatrixXd q_values(const TabularMDP& mdp, const VectorXd& reward, double tolerance) {
    const auto S = mdp.num_states;
    const auto A = mdp.num_actions;
    if (reward.size() != mdp.num_pairs()) throw std::invalid_argument("q_values: reward must have length S*A");

    MatrixXd q = MatrixXd::Zero(S, A);
    VectorXd v = VectorXd::Zero(S);
    MatrixXd next(S, A);
    for (;;) {
        for (Eigen::Index a = 0; a < A; ++a)
            next.col(a) = reward.segment(a * S, S) + mdp.gamma * (mdp.transitions[a] * v);
        const double residual = (next - q).cwiseAbs().maxCoeff();
        q.swap(next);
        v = q.rowwise().maxCoeff();
        if (residual < tolerance) break;
    }
    return q;
}

VectorXd flow_residual_lhs(const TabularMDP& mdp, const VectorXd& u) {
    const auto S = mdp.num_states;
    VectorXd lhs = VectorXd::Zero(S);
    for (Eigen::Index a = 0; a < mdp.num_actions; ++a) {
        const auto ua = u.segment(a * S, S);
        lhs += ua - mdp.gamma * (mdp.transitions[a].transpose() * ua);
    }
    return lhs;
}

StochasticPolicy greedy_policy(const MatrixXd& q) {
    StochasticPolicy policy{MatrixXd::Zero(q.rows(), q.cols())};
    for (Eigen::Index s = 0; s < q.rows(); ++s) {
        Eigen::Index best = 0;
        for (Eigen::Index a = 1; a < q.cols(); ++a)
            if (q(s, a) > q(s, best)) best = a;
        policy.probs(s, best) = 1.0;
    }
    return policy;
}

StochasticPolicy uniform_policy(const TabularMDP& mdp) {
    return {MatrixXd::Constant(mdp.num_states, mdp.num_actions, 1.0 / static_cast<double>(mdp.num_actions))};
}

} // namespace broil
