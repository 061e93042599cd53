"""Continuous-time consumption-savings solver.

Thin wrapper over the compiled core: Howard iteration for the HJB
equation on a wealth grid, the stationary Fokker-Planck density of the
converged policy, and the validation diagnostics.
"""

from wealthpde._core import (
    CheckSettings,
    ConfigError,
    Grid,
    McDensityReport,
    MertonRegime,
    MertonReport,
    ModelParams,
    OutputSettings,
    PolicySolution,
    PostprocessSettings,
    RunConfig,
    RunResult,
    SimulationSettings,
    SolverError,
    SolverSettings,
    StationaryDensity,
    TraceRecord,
    UnsupportedError,
    W2Report,
    compute_flux,
    crra_marginal,
    crra_utility,
    discrete_face_flux,
    inverse_marginal,
    load_config,
    mc_density_defaults,
    merton_validation,
    monte_carlo_density_check,
    parse_config,
    policy_evaluation,
    policy_improvement,
    postprocess,
    project_slope_band,
    quadrature_weights,
    run_pipeline,
    serialize_config,
    smooth,
    solve_hjb,
    solve_stationary,
    w2_contraction_check,
    wasserstein2_1d,
)

__version__ = "0.1.0"

__all__ = [
    "CheckSettings",
    "ConfigError",
    "Grid",
    "McDensityReport",
    "MertonRegime",
    "MertonReport",
    "ModelParams",
    "OutputSettings",
    "PolicySolution",
    "PostprocessSettings",
    "RunConfig",
    "RunResult",
    "SimulationSettings",
    "SolverError",
    "SolverSettings",
    "StationaryDensity",
    "TraceRecord",
    "UnsupportedError",
    "W2Report",
    "compute_flux",
    "crra_marginal",
    "crra_utility",
    "discrete_face_flux",
    "inverse_marginal",
    "load_config",
    "mc_density_defaults",
    "merton_validation",
    "monte_carlo_density_check",
    "parse_config",
    "policy_evaluation",
    "policy_improvement",
    "postprocess",
    "project_slope_band",
    "quadrature_weights",
    "run_pipeline",
    "serialize_config",
    "smooth",
    "solve_hjb",
    "solve_stationary",
    "w2_contraction_check",
    "wasserstein2_1d",
]
