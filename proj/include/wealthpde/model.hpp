#pragma once

#include <vector>

namespace wealthpde {

/// Values of a scalar function sampled on the wealth grid, one per node.
using GridFunction = std::vector<double>;

/// Consumption is kept strictly positive; marginal utility stays finite.
inline constexpr double kConsumptionFloor = 1e-10;

/// Economic primitives of the consumption-savings model.
///   da = (r a + y - c) dt + sigma dW,  a in [0, a_max], no borrowing.
struct ModelParams {
    double r = 0.03;      // return on wealth (any real)
    double rho = 0.04;    // subjective discount rate, > 0
    double gamma = 2.0;   // relative risk aversion, > 0
    double y = 1.0;       // labor income, >= 0
    double sigma = 0.22;  // wealth diffusion, >= 0

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

/// Uniform grid on [0, a_max].
struct Grid {
    double a_max = 20.0;
    int n_a = 240;
    double da = 0.0;
    std::vector<double> nodes;

    /// a_max > 0, n_a >= 3; nodes[0] == 0 and nodes[n_a-1] == a_max exactly.
    static Grid uniform(double a_max, int n_a);
};

/// CRRA utility. gamma == 1.0 (exact comparison) selects log.
/// Throws std::domain_error for c <= 0.
double crra_utility(double c, double gamma);

/// u'(c) = c^(-gamma). Throws std::domain_error for c <= 0.
double crra_marginal(double c, double gamma);

/// (u')^{-1}: marginal utility vp back to consumption, vp^(-1/gamma).
/// Throws std::domain_error for vp <= 0.
double inverse_marginal(double vp, double gamma);

/// Wealth drift mu = r a + y - c.
inline double drift(double a, double c, const ModelParams& p) {
    return p.r * a + p.y - c;
}

} // namespace wealthpde
