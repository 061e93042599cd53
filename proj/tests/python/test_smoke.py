"""End-to-end smoke of the python bindings on small grids."""

import pytest

import wealthpde as wp


@pytest.fixture(scope="module")
def table_solution():
    grid = wp.Grid.uniform(20.0, 120)
    params = wp.ModelParams()
    sol = wp.solve_hjb(grid, params, wp.SolverSettings(), wp.PostprocessSettings())
    return grid, params, sol


def test_default_solve_converges(table_solution):
    grid, params, sol = table_solution
    assert sol.converged
    assert sol.iterations <= 2000
    assert sol.trace[-1].foc_error <= 5e-6
    assert sol.trace[-1].hjb_residual <= 5e-5
    assert all(t.m_matrix_ok for t in sol.trace)
    assert len(sol.c) == grid.n_a
    # consumption strictly increasing in wealth, drift consistent
    assert all(b > a for a, b in zip(sol.c, sol.c[1:]))
    for a, c, mu in zip(grid.nodes, sol.c, sol.mu):
        assert mu == pytest.approx(params.r * a + params.y - c)


def test_stationary_density(table_solution):
    grid, params, sol = table_solution
    density = wp.solve_stationary(sol, grid, params)
    assert density.mass == pytest.approx(1.0, abs=1e-10)
    assert min(density.p) >= 0.0
    scale = max(abs(m * p) for m, p in zip(sol.mu, density.p))
    assert abs(density.flux_left) <= 1e-8 * scale
    assert abs(density.flux_right) <= 1e-8 * scale
    face = wp.discrete_face_flux(density.p, sol, grid, params)
    assert max(abs(f) for f in face) <= 1e-8 * scale


def test_sigma_zero_density_unsupported():
    grid = wp.Grid.uniform(20.0, 60)
    params = wp.ModelParams()
    params.sigma = 0.0
    sol = wp.solve_hjb(grid, params, wp.SolverSettings(), wp.PostprocessSettings())
    with pytest.raises(wp.UnsupportedError):
        wp.solve_stationary(sol, grid, params)


def test_merton_constrained_regime():
    grid = wp.Grid.uniform(20.0, 120)
    rep = wp.merton_validation(
        grid, wp.ModelParams(), wp.SolverSettings(), wp.PostprocessSettings()
    )
    assert rep.kappa == pytest.approx(0.035)
    assert rep.regime == wp.MertonRegime.constrained
    assert rep.converged
    assert rep.rel_sup_error <= 1e-3


def test_w2_contraction_deterministic(table_solution):
    grid, params, sol = table_solution
    sim = wp.SimulationSettings()
    first = wp.w2_contraction_check(sol, grid, params, sim)
    second = wp.w2_contraction_check(sol, grid, params, sim)
    assert first.contracting
    assert first.median_ratio < 1.0
    assert first.median_ratio == second.median_ratio
    assert first.per_step_ratios == second.per_step_ratios


def test_postprocess_slope_band():
    grid = wp.Grid.uniform(20.0, 41)
    ragged = [1.0 + 3.0 * ((7 * i) % 5) for i in range(41)]
    out = wp.postprocess(ragged, grid, wp.PostprocessSettings())
    slopes = [(b - a) / grid.da for a, b in zip(out, out[1:])]
    assert min(slopes) >= 0.0375 - 1e-12
    assert max(slopes) <= 0.28 + 1e-12


def test_config_round_trip():
    config = wp.RunConfig()
    config.n_a = 96
    config.economics.sigma = 0.3
    config.checks.mc_density = False
    assert wp.parse_config(wp.serialize_config(config)) == config


def test_config_rejects_unknown_key():
    with pytest.raises(wp.ConfigError):
        wp.parse_config("[economics]\nshoe_size = 44\n")


def test_pipeline_smoke():
    config = wp.RunConfig()
    config.n_a = 96
    config.checks.mc_density = False  # long-run budget, covered elsewhere
    result = wp.run_pipeline(config)
    assert result.policy.converged
    assert result.m_matrix_ok_all
    assert result.diagnostics_passed
    assert result.density is not None
    assert result.mc_density is None
    assert result.w2 is not None and result.w2.contracting
    assert result.merton is not None and result.merton.rel_sup_error <= 1e-3
    assert "solve" in result.wall_seconds
