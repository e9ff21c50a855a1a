#pragma once

#include <Eigen/Dense>

/**
 * Value at risk and conditional value at risk of a finite distribution.
 *
 * Convention: larger outcomes are better and alpha is the risk-aversion
 * level. The risk measures look at the LOW tail of mass (1 - alpha):
 *
 *     VaR_alpha[X]  = sup { x : Pr(X >= x) >= alpha }
 *     CVaR_alpha[X] = max_sigma  sigma - E[(sigma - X)_+] / (1 - alpha)
 *
 * alpha = 0 gives the mean; alpha -> 1 approaches the minimum. alpha = 1
 * itself is rejected because of the 1 / (1 - alpha) factor.
 */
namespace broil {

struct DiscreteDistribution {
    Eigen::VectorXd values;
    Eigen::VectorXd probs;

    /// Uniform weights over the given outcomes.
    static DiscreteDistribution uniform(Eigen::VectorXd values);

    void validate() const;
};

struct CvarResult {
    double cvar = 0.0;
    double sigma_star = 0.0; ///< maximizing sigma, always one of the outcomes
};

double mean(const DiscreteDistribution& dist);

double var_alpha(const DiscreteDistribution& dist, double alpha);

CvarResult cvar_alpha(const DiscreteDistribution& dist, double alpha);

/// The concave CVaR objective sigma - E[(sigma - X)_+] / (1 - alpha) at a fixed sigma.
double cvar_objective(const DiscreteDistribution& dist, double alpha, double sigma);

/// lambda * mean + (1 - lambda) * CVaR_alpha.
double soft_robust_value(const DiscreteDistribution& dist, double alpha, double lambda);

} // namespace broil
