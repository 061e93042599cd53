#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wealthpde/fpk.hpp"
#include "wealthpde/hjb.hpp"
#include "wealthpde/model.hpp"

namespace wealthpde {

struct SimulationSettings {
    int n_agents = 4000;   // >= 2
    double dt = 0.0025;    // > 0
    int n_steps = 32;      // >= 1
    std::uint64_t seed = 42;
    int burn_in = 0;       // >= 0, only meaningful for long-run runs
    // Boundary handling: clamping by default; fold-back reflection as an
    // option. At the default step sizes the overshoot is O(sigma*sqrt(dt)),
    // so the two differ only in the first cell.
    bool reflect_boundaries = false;

    void validate() const;

    bool operator==(const SimulationSettings&) const = default;
};

/// Defaults of the long-run Monte Carlo density cross-check:
/// 10000 agents, dt = 0.01, 200 time units, burn-in half the steps.
SimulationSettings mc_density_defaults(std::uint64_t seed);

/// Empirical 2-Wasserstein distance between equally sized samples:
/// sqrt(mean of squared differences of sorted values).
/// Throws std::invalid_argument on size mismatch or empty input.
double wasserstein2_1d(const std::vector<double>& x, const std::vector<double>& y);

/// Euler-Maruyama under the converged policy (linear interpolation between
/// nodes). Overshoot past [0, a_max] is clamped, or folded back when
/// sim.reflect_boundaries is set. Returns n_steps + 1 sample sets, the
/// initial population first. Increments are standard normals drawn from
/// rng, agent-major within each step.
std::vector<std::vector<double>>
simulate_population(const std::vector<double>& initial, const PolicySolution& policy,
                    const Grid& grid, const ModelParams& params,
                    const SimulationSettings& sim, std::mt19937_64& rng);

struct W2Report {
    std::vector<double> per_step_ratios;  // W2(t_j)/W2(t_{j-1}), zero-distance steps excluded
    double median_ratio = 0.0;
    double iqr_lo = 0.0;                  // 25th percentile of the step ratios
    double iqr_hi = 0.0;                  // 75th
    double w2_initial = 0.0;
    double w2_final = 0.0;
    double evolution_ratio = 0.0;         // W2 after the whole evolution / before
    bool contracting = false;
    int zero_distance_warnings = 0;

    std::vector<double> w2_path;          // W2 at steps 0..k
};

/// Coupled evolution of two explicit initial populations: both kept
/// sorted, the same Gaussian increment applied to rank-matched agents.
W2Report w2_coupled_evolution(std::vector<double> pop_a, std::vector<double> pop_b,
                              const PolicySolution& policy, const Grid& grid,
                              const ModelParams& params, const SimulationSettings& sim);

/// Contraction check with the two populations drawn uniformly from
/// [0, a_max/2] and [a_max/2, a_max]. Deterministic given sim.seed.
W2Report w2_contraction_check(const PolicySolution& policy, const Grid& grid,
                              const ModelParams& params, const SimulationSettings& sim);

enum class MertonRegime { interior, constrained };

struct MertonReport {
    double kappa = 0.0;           // (rho - (1-gamma) r) / gamma
    MertonRegime regime = MertonRegime::interior;
    GridFunction analytic_c;
    GridFunction numeric_c;
    double rel_sup_error = 0.0;   // excludes the two nodes at each boundary
    bool converged = false;
};

/// sigma = 0 closed-form check: interior regime (kappa <= r) has
/// c = kappa (a + y/r); constrained regime (kappa > r) has c = r a + y.
/// Runs solve_hjb with sigma forced to 0. Throws UnsupportedError for the
/// interior regime with r = 0.
MertonReport merton_validation(const Grid& grid, const ModelParams& params,
                               const SolverSettings& settings,
                               const PostprocessSettings& post);

struct McDensityReport {
    GridFunction p_mc;       // pooled empirical density at the grid nodes
    double l1_error = 0.0;   // sum |p_fpk - p_mc| * da
    int pooled_samples = 0;
};

/// Long-run Euler-Maruyama cross-check of the stationary density: pool
/// post-burn-in snapshots every 1 time unit, bin into cells centered on
/// the grid nodes (half cells at the boundaries), compare in L1.
McDensityReport monte_carlo_density_check(const PolicySolution& policy,
                                          const StationaryDensity& density,
                                          const Grid& grid, const ModelParams& params,
                                          const SimulationSettings& sim);

} // namespace wealthpde
