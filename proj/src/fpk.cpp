#include "wealthpde/fpk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wealthpde/errors.hpp"

namespace wealthpde {

std::vector<double> quadrature_weights(const Grid& grid) {
    std::vector<double> w(grid.n_a, grid.da);
    w.front() = 0.5 * grid.da;
    w.back() = 0.5 * grid.da;
    return w;
}

GridFunction compute_flux(const GridFunction& p, const PolicySolution& policy,
                          const Grid& grid, const ModelParams& params) {
    const int n = grid.n_a;
    if (static_cast<int>(p.size()) != n)
        throw std::invalid_argument("p: length must equal grid n_a");
    if (static_cast<int>(policy.mu.size()) != n)
        throw std::invalid_argument("policy: mu length must equal grid n_a");

    const double half_var = 0.5 * params.sigma * params.sigma;
    GridFunction j(n);
    for (int i = 0; i < n; ++i) {
        double dp;
        if (i == 0)
            dp = (p[1] - p[0]) / grid.da;
        else if (i == n - 1)
            dp = (p[n - 1] - p[n - 2]) / grid.da;
        else
            dp = (p[i + 1] - p[i - 1]) / (2.0 * grid.da);
        j[i] = policy.mu[i] * p[i] - half_var * dp;
    }
    return j;
}

GridFunction discrete_face_flux(const GridFunction& p, const PolicySolution& policy,
                                const Grid& grid, const ModelParams& params) {
    const int n = grid.n_a;
    if (static_cast<int>(p.size()) != n)
        throw std::invalid_argument("p: length must equal grid n_a");
    const UpwindOperator op = build_upwind_operator(policy.c, grid, params);

    // Rightward flux across the face between i and i+1, in the same units
    // as compute_flux: da * (rate out of i upward - rate out of i+1 downward).
    GridFunction f(n - 1);
    for (int i = 0; i + 1 < n; ++i)
        f[i] = grid.da * (op.a.upper[i] * p[i] - op.a.lower[i + 1] * p[i + 1]);
    return f;
}

StationaryDensity solve_stationary(const PolicySolution& policy, const Grid& grid,
                                   const ModelParams& params) {
    params.validate();
    if (params.sigma == 0.0)
        throw UnsupportedError(
            "solve_stationary: sigma = 0 has a degenerate stationary density; "
            "use the Monte Carlo diagnostic instead");
    if (!policy.converged)
        throw std::invalid_argument("solve_stationary: policy must be converged");
    if (static_cast<int>(policy.c.size()) != grid.n_a)
        throw std::invalid_argument("policy: c length must equal grid n_a");

    const int n = grid.n_a;
    const UpwindOperator op = build_upwind_operator(policy.c, grid, params);

    // A^T p = 0 with one equation replaced by the unit-mass normalization.
    // The retained equations telescope: row 0 balances the first face
    // (upper_0 p_0 = lower_1 p_1) and each later row adds one face, so the
    // unique solution balances every face pairwise. Chaining those ratios
    // builds it directly. A general tridiagonal solve of the replaced-row
    // system computes the same vector but its conditioning degrades with
    // the density's dynamic range, which spans many orders of magnitude
    // when drift piles mass against one wall; the cumulative-log form is
    // exact for any range.
    std::vector<double> log_p(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double up = op.a.upper[i];
        const double dn = op.a.lower[i + 1];
        if (!(up > 0.0) || !(dn > 0.0))
            throw SolverError(
                "solve_stationary: singular system after the normalization "
                "row (no transition rate across face " + std::to_string(i) +
                ")");
        log_p[i + 1] = log_p[i] + std::log(up) - std::log(dn);
    }
    const double log_peak = *std::max_element(log_p.begin(), log_p.end());
    GridFunction p(n);
    for (int i = 0; i < n; ++i) p[i] = std::exp(log_p[i] - log_peak);

    const std::vector<double> w = quadrature_weights(grid);
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(p[i]))
            throw SolverError("solve_stationary: non-finite density at node " +
                              std::to_string(i));
        mass += w[i] * p[i];
    }
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw SolverError("solve_stationary: non-positive density mass");
    for (double& v : p) v /= mass;

    double min_p = 0.0;
    for (double v : p) min_p = std::min(min_p, v);
    if (min_p < -1e-12)
        throw SolverError("solve_stationary: density sign structure violated (min " +
                          std::to_string(min_p) + ")");
    if (min_p < 0.0) {
        for (double& v : p) v = std::max(v, 0.0);
        double clipped_mass = 0.0;
        for (int i = 0; i < n; ++i) clipped_mass += w[i] * p[i];
        for (double& v : p) v /= clipped_mass;
    }

    StationaryDensity out;
    out.p = std::move(p);
    out.mass = 0.0;
    for (int i = 0; i < n; ++i) out.mass += w[i] * out.p[i];
    // Boundary leakage in the scheme's own accounting: the flux across the
    // outermost faces. (The pointwise formula of compute_flux carries the
    // O(da) truncation of the unresolved wall layer and is not a leakage
    // measure.)
    const GridFunction face = discrete_face_flux(out.p, policy, grid, params);
    out.flux_left = face.front();
    out.flux_right = face.back();
    return out;
}

} // namespace wealthpde
