#pragma once

#include "wealthpde/hjb.hpp"
#include "wealthpde/model.hpp"

namespace wealthpde {

/// Stationary wealth distribution of the converged policy.
struct StationaryDensity {
    GridFunction p;           // density values at the grid nodes
    double mass = 0.0;        // trapezoid integral, 1 after normalization
    double flux_left = 0.0;   // probability flux J at a = 0
    double flux_right = 0.0;  // J at a = a_max
};

/// Trapezoid quadrature weights of the grid (da/2 at the ends, da inside).
std::vector<double> quadrature_weights(const Grid& grid);

/// Probability flux J_i = mu_i p_i - sigma^2/2 * p'_i with a central
/// difference for p' (one-sided at the boundaries).
GridFunction compute_flux(const GridFunction& p, const PolicySolution& policy,
                          const Grid& grid, const ModelParams& params);

/// Half-cell flux of the discrete scheme itself: F[i] is the flux across
/// the face between nodes i and i+1 implied by A^T p (length n_a - 1).
/// Identically zero, up to solve roundoff, for the stationary density.
GridFunction discrete_face_flux(const GridFunction& p, const PolicySolution& policy,
                                const Grid& grid, const ModelParams& params);

/// Solve the stationary Fokker-Planck equation A^T p = 0, normalized to
/// unit trapezoid mass; tiny negative roundoff (|p| <= 1e-12) is clipped
/// and the density renormalized. Throws UnsupportedError when sigma == 0
/// and SolverError when the sign structure or solve fails.
StationaryDensity solve_stationary(const PolicySolution& policy, const Grid& grid,
                                   const ModelParams& params);

} // namespace wealthpde
