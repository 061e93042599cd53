#include "wealthpde/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wealthpde {

void ModelParams::validate() const {
    if (!std::isfinite(r)) throw std::invalid_argument("r: must be finite");
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("rho: must be > 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("gamma: must be > 0");
    if (!(y >= 0.0) || !std::isfinite(y))
        throw std::invalid_argument("y: must be >= 0");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma: must be >= 0");
}

Grid Grid::uniform(double a_max, int n_a) {
    if (!(a_max > 0.0) || !std::isfinite(a_max))
        throw std::invalid_argument("a_max: must be > 0");
    if (n_a < 3) throw std::invalid_argument("n_a: must be >= 3");

    Grid g;
    g.a_max = a_max;
    g.n_a = n_a;
    g.da = a_max / static_cast<double>(n_a - 1);
    g.nodes.resize(n_a);
    for (int i = 0; i < n_a; ++i)
        g.nodes[i] = static_cast<double>(i) * g.da;
    g.nodes.front() = 0.0;
    g.nodes.back() = a_max;
    return g;
}

double crra_utility(double c, double gamma) {
    if (!(c > 0.0)) throw std::domain_error("crra_utility: c must be > 0");
    if (gamma == 1.0) return std::log(c);
    return (std::pow(c, 1.0 - gamma) - 1.0) / (1.0 - gamma);
}

double crra_marginal(double c, double gamma) {
    if (!(c > 0.0)) throw std::domain_error("crra_marginal: c must be > 0");
    return std::pow(c, -gamma);
}

double inverse_marginal(double vp, double gamma) {
    if (!(vp > 0.0)) throw std::domain_error("inverse_marginal: vp must be > 0");
    return std::pow(vp, -1.0 / gamma);
}

} // namespace wealthpde
