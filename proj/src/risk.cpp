#include "broil/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace broil {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
}

// Indices sorted by value; ties keep original index order.
std::vector<Eigen::Index> sorted_order(const Eigen::VectorXd& values, bool descending) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return descending ? values(a) > values(b) : values(a) < values(b);
    });
    return order;
}

} // namespace

DiscreteDistribution DiscreteDistribution::uniform(Eigen::VectorXd values) {
    const auto n = values.size();
    if (n == 0) throw std::invalid_argument("distribution: no outcomes");
    return {std::move(values), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

void DiscreteDistribution::validate() const {
    if (values.size() == 0) throw std::invalid_argument("distribution: no outcomes");
    if (probs.size() != values.size()) throw std::invalid_argument("distribution: probs/values size mismatch");
    if (probs.minCoeff() < 0.0) throw std::invalid_argument("distribution: negative probability");
    if (std::abs(probs.sum() - 1.0) > 1e-9) throw std::invalid_argument("distribution: probs do not sum to 1");
}

double mean(const DiscreteDistribution& dist) {
    dist.validate();
    return dist.probs.dot(dist.values);
}

double var_alpha(const DiscreteDistribution& dist, double alpha) {
    dist.validate();
    check_alpha(alpha);
    const auto order = sorted_order(dist.values, true);
    double mass = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        mass += dist.probs(order[i]);
        const bool last_of_tie = i + 1 == order.size() || dist.values(order[i + 1]) != dist.values(order[i]);
        if (last_of_tie && mass >= alpha - 1e-12) return dist.values(order[i]);
    }
    return dist.values(order.back());
}

double cvar_objective(const DiscreteDistribution& dist, double alpha, double sigma) {
    check_alpha(alpha);
    const double shortfall = dist.probs.dot((sigma - dist.values.array()).max(0.0).matrix());
    return sigma - shortfall / (1.0 - alpha);
}

CvarResult cvar_alpha(const DiscreteDistribution& dist, double alpha) {
    dist.validate();
    check_alpha(alpha);
    // The objective is concave and piecewise linear with kinks at the outcomes,
    // so scanning the sorted outcomes with prefix sums finds the maximum exactly.
    const auto order = sorted_order(dist.values, false);
    const double scale = 1.0 / (1.0 - alpha);
    double mass_below = 0.0;     // sum of p_i over outcomes strictly before the current one
    double weighted_below = 0.0; // sum of p_i x_i over the same outcomes
    CvarResult best{-std::numeric_limits<double>::infinity(), 0.0};
    for (const auto idx : order) {
        const double sigma = dist.values(idx);
        const double objective = sigma - scale * (sigma * mass_below - weighted_below);
        if (objective > best.cvar) best = {objective, sigma};
        mass_below += dist.probs(idx);
        weighted_below += dist.probs(idx) * sigma;
    }
    return best;
}

double soft_robust_value(const DiscreteDistribution& dist, double alpha, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
    return lambda * mean(dist) + (1.0 - lambda) * cvar_alpha(dist, alpha).cvar;
}

} // namespace broil
