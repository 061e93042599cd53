// Python bindings of the solver core. Vectors cross the boundary as
// plain lists (copies); solves release nothing and run on the calling
// thread, so keep the grids small from notebooks.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wealthpde/config.hpp"
#include "wealthpde/diagnostics.hpp"
#include "wealthpde/errors.hpp"
#include "wealthpde/fpk.hpp"
#include "wealthpde/hjb.hpp"
#include "wealthpde/model.hpp"
#include "wealthpde/pipeline.hpp"
#include "wealthpde/postprocess.hpp"

namespace py = pybind11;
using namespace wealthpde;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Continuous-time consumption-savings solver core";

    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<UnsupportedError>(m, "UnsupportedError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("r", &ModelParams::r)
        .def_readwrite("rho", &ModelParams::rho)
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_readwrite("y", &ModelParams::y)
        .def_readwrite("sigma", &ModelParams::sigma)
        .def("validate", &ModelParams::validate)
        .def(py::self == py::self)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(r=" + std::to_string(p.r) +
                   ", rho=" + std::to_string(p.rho) +
                   ", gamma=" + std::to_string(p.gamma) +
                   ", y=" + std::to_string(p.y) +
                   ", sigma=" + std::to_string(p.sigma) + ")";
        });

    py::class_<Grid>(m, "Grid")
        .def_static("uniform", &Grid::uniform, py::arg("a_max"), py::arg("n_a"))
        .def_readonly("a_max", &Grid::a_max)
        .def_readonly("n_a", &Grid::n_a)
        .def_readonly("da", &Grid::da)
        .def_readonly("nodes", &Grid::nodes)
        .def("__repr__", [](const Grid& g) {
            return "Grid(a_max=" + std::to_string(g.a_max) +
                   ", n_a=" + std::to_string(g.n_a) + ")";
        });

    py::class_<SolverSettings>(m, "SolverSettings")
        .def(py::init<>())
        .def_readwrite("tol_foc", &SolverSettings::tol_foc)
        .def_readwrite("tol_hjb", &SolverSettings::tol_hjb)
        .def_readwrite("max_iter", &SolverSettings::max_iter)
        .def_readwrite("relaxation", &SolverSettings::relaxation)
        .def_readwrite("init_fraction", &SolverSettings::init_fraction)
        .def_readwrite("enforce_mu_nonneg_sigma0",
                       &SolverSettings::enforce_mu_nonneg_sigma0)
        .def("validate", &SolverSettings::validate)
        .def(py::self == py::self);

    py::class_<PostprocessSettings>(m, "PostprocessSettings")
        .def(py::init<>())
        .def_readwrite("enabled", &PostprocessSettings::enabled)
        .def_readwrite("smoothing_passes", &PostprocessSettings::smoothing_passes)
        .def_readwrite("window", &PostprocessSettings::window)
        .def_readwrite("slope_lo", &PostprocessSettings::slope_lo)
        .def_readwrite("slope_hi", &PostprocessSettings::slope_hi)
        .def("validate", &PostprocessSettings::validate)
        .def(py::self == py::self);

    py::class_<SimulationSettings>(m, "SimulationSettings")
        .def(py::init<>())
        .def_readwrite("n_agents", &SimulationSettings::n_agents)
        .def_readwrite("dt", &SimulationSettings::dt)
        .def_readwrite("n_steps", &SimulationSettings::n_steps)
        .def_readwrite("seed", &SimulationSettings::seed)
        .def_readwrite("burn_in", &SimulationSettings::burn_in)
        .def_readwrite("reflect_boundaries", &SimulationSettings::reflect_boundaries)
        .def("validate", &SimulationSettings::validate)
        .def(py::self == py::self);

    py::class_<TraceRecord>(m, "TraceRecord")
        .def_readonly("iteration", &TraceRecord::iteration)
        .def_readonly("hjb_residual", &TraceRecord::hjb_residual)
        .def_readonly("foc_error", &TraceRecord::foc_error)
        .def_readonly("m_matrix_ok", &TraceRecord::m_matrix_ok)
        .def_readonly("foc_gap", &TraceRecord::foc_gap);

    py::class_<PolicySolution>(m, "PolicySolution")
        .def_readonly("v", &PolicySolution::v)
        .def_readonly("c", &PolicySolution::c)
        .def_readonly("mu", &PolicySolution::mu)
        .def_readonly("trace", &PolicySolution::trace)
        .def_readonly("converged", &PolicySolution::converged)
        .def_readonly("iterations", &PolicySolution::iterations);

    py::class_<StationaryDensity>(m, "StationaryDensity")
        .def_readonly("p", &StationaryDensity::p)
        .def_readonly("mass", &StationaryDensity::mass)
        .def_readonly("flux_left", &StationaryDensity::flux_left)
        .def_readonly("flux_right", &StationaryDensity::flux_right);

    py::class_<W2Report>(m, "W2Report")
        .def_readonly("per_step_ratios", &W2Report::per_step_ratios)
        .def_readonly("median_ratio", &W2Report::median_ratio)
        .def_readonly("iqr_lo", &W2Report::iqr_lo)
        .def_readonly("iqr_hi", &W2Report::iqr_hi)
        .def_readonly("w2_initial", &W2Report::w2_initial)
        .def_readonly("w2_final", &W2Report::w2_final)
        .def_readonly("evolution_ratio", &W2Report::evolution_ratio)
        .def_readonly("contracting", &W2Report::contracting)
        .def_readonly("zero_distance_warnings", &W2Report::zero_distance_warnings)
        .def_readonly("w2_path", &W2Report::w2_path);

    py::enum_<MertonRegime>(m, "MertonRegime")
        .value("interior", MertonRegime::interior)
        .value("constrained", MertonRegime::constrained);

    py::class_<MertonReport>(m, "MertonReport")
        .def_readonly("kappa", &MertonReport::kappa)
        .def_readonly("regime", &MertonReport::regime)
        .def_readonly("analytic_c", &MertonReport::analytic_c)
        .def_readonly("numeric_c", &MertonReport::numeric_c)
        .def_readonly("rel_sup_error", &MertonReport::rel_sup_error)
        .def_readonly("converged", &MertonReport::converged);

    py::class_<McDensityReport>(m, "McDensityReport")
        .def_readonly("p_mc", &McDensityReport::p_mc)
        .def_readonly("l1_error", &McDensityReport::l1_error)
        .def_readonly("pooled_samples", &McDensityReport::pooled_samples);

    py::class_<OutputSettings>(m, "OutputSettings")
        .def(py::init<>())
        .def_readwrite("directory", &OutputSettings::directory)
        .def_readwrite("write_solution", &OutputSettings::write_solution)
        .def_readwrite("write_trace", &OutputSettings::write_trace)
        .def_readwrite("write_report", &OutputSettings::write_report)
        .def(py::self == py::self);

    py::class_<CheckSettings>(m, "CheckSettings")
        .def(py::init<>())
        .def_readwrite("w2", &CheckSettings::w2)
        .def_readwrite("merton", &CheckSettings::merton)
        .def_readwrite("mc_density", &CheckSettings::mc_density)
        .def_readwrite("fpk_flux", &CheckSettings::fpk_flux)
        .def(py::self == py::self);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("economics", &RunConfig::economics)
        .def_readwrite("a_max", &RunConfig::a_max)
        .def_readwrite("n_a", &RunConfig::n_a)
        .def_readwrite("solver", &RunConfig::solver)
        .def_readwrite("postprocess", &RunConfig::postprocess)
        .def_readwrite("simulation", &RunConfig::simulation)
        .def_readwrite("outputs", &RunConfig::outputs)
        .def_readwrite("checks", &RunConfig::checks)
        .def("make_grid", &RunConfig::make_grid)
        .def("validate", &RunConfig::validate)
        .def(py::self == py::self);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("config", &RunResult::config)
        .def_readonly("policy", &RunResult::policy)
        .def_readonly("density", &RunResult::density)
        .def_readonly("w2", &RunResult::w2)
        .def_readonly("merton", &RunResult::merton)
        .def_readonly("mc_density", &RunResult::mc_density)
        .def_readonly("m_matrix_ok_all", &RunResult::m_matrix_ok_all)
        .def_readonly("diagnostics_passed", &RunResult::diagnostics_passed)
        .def_readonly("wall_seconds", &RunResult::wall_seconds)
        .def_readonly("skipped", &RunResult::skipped);

    m.def("crra_utility", &crra_utility, py::arg("c"), py::arg("gamma"));
    m.def("crra_marginal", &crra_marginal, py::arg("c"), py::arg("gamma"));
    m.def("inverse_marginal", &inverse_marginal, py::arg("vp"), py::arg("gamma"));

    m.def("smooth", &smooth, py::arg("c"), py::arg("passes"), py::arg("window"),
          "Repeated centered moving average, windows shrinking at the ends");
    m.def("project_slope_band", &project_slope_band, py::arg("c"), py::arg("grid"),
          py::arg("slope_lo"), py::arg("slope_hi"),
          "Clamp discrete slopes into [slope_lo, slope_hi]");
    m.def("postprocess", &postprocess, py::arg("c"), py::arg("grid"),
          py::arg("settings"), "Smooth, project the slope band, re-floor");

    m.def("policy_evaluation", &policy_evaluation, py::arg("c"), py::arg("grid"),
          py::arg("params"), "Value of following policy c forever");
    m.def("policy_improvement", &policy_improvement, py::arg("v"), py::arg("grid"),
          py::arg("params"), "Upwind-consistent first-order condition");
    m.def("solve_hjb",
          py::overload_cast<const Grid&, const ModelParams&, const SolverSettings&,
                            const PostprocessSettings&>(&solve_hjb),
          py::arg("grid"), py::arg("params"), py::arg("settings"),
          py::arg("postprocess"),
          "Howard policy iteration with per-iteration postprocessing");

    m.def("quadrature_weights", &quadrature_weights, py::arg("grid"));
    m.def("compute_flux", &compute_flux, py::arg("p"), py::arg("policy"),
          py::arg("grid"), py::arg("params"),
          "Pointwise probability flux mu p - sigma^2/2 p'");
    m.def("discrete_face_flux", &discrete_face_flux, py::arg("p"), py::arg("policy"),
          py::arg("grid"), py::arg("params"),
          "Flux across each cell face implied by the discrete operator");
    m.def("solve_stationary", &solve_stationary, py::arg("policy"), py::arg("grid"),
          py::arg("params"), "Stationary density of the converged policy");

    m.def("wasserstein2_1d", &wasserstein2_1d, py::arg("x"), py::arg("y"),
          "Empirical 2-Wasserstein distance of equally sized samples");
    m.def("w2_contraction_check", &w2_contraction_check, py::arg("policy"),
          py::arg("grid"), py::arg("params"), py::arg("sim"),
          "Synchronous-coupling contraction diagnostic");
    m.def("merton_validation", &merton_validation, py::arg("grid"), py::arg("params"),
          py::arg("settings"), py::arg("post"),
          "sigma = 0 closed-form comparison");
    m.def("monte_carlo_density_check", &monte_carlo_density_check, py::arg("policy"),
          py::arg("density"), py::arg("grid"), py::arg("params"), py::arg("sim"),
          "Long-run Euler-Maruyama cross-check of the stationary density");
    m.def("mc_density_defaults", &mc_density_defaults, py::arg("seed"),
          "Simulation settings of the long-run density check");

    m.def("parse_config", &parse_config, py::arg("text"),
          py::arg("origin") = "<string>");
    m.def("load_config", &load_config, py::arg("path"));
    m.def("serialize_config", &serialize_config, py::arg("config"));
    m.def("run_pipeline", &run_pipeline, py::arg("config"),
          "Solve plus enabled diagnostics; writes nothing to disk");
}
