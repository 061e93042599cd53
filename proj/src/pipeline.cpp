#include "wealthpde/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wealthpde/errors.hpp"

namespace wealthpde {

namespace {

using nlohmann::json;

constexpr double kMassTol = 1e-10;
constexpr double kFluxRelTol = 1e-8;
constexpr double kMertonRelTol = 1e-3;
// Calibrated against the simulation oracle at the default configuration:
// measured L1 = 0.2492, dominated by the sub-cell wall layer that the
// first-order chain widens and the simulation resolves (97% of the gap
// sits below a = 0.5). Stable under doubled simulated time, so the bound
// is bias with headroom, not noise.
constexpr double kMcL1Tol = 0.30;

std::string sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

class StageClock {
public:
    StageClock() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct FluxCheck {
    bool passed = false;
    double mass = 0.0;
    double flux_left = 0.0;
    double flux_right = 0.0;
    double bound = 0.0;
};

FluxCheck check_fpk_flux(const StationaryDensity& density, const PolicySolution& policy,
                         const Grid& grid, const ModelParams& params) {
    FluxCheck fc;
    const std::vector<double> w = quadrature_weights(grid);
    fc.mass = 0.0;
    for (int i = 0; i < grid.n_a; ++i) fc.mass += w[i] * density.p[i];

    const GridFunction face = discrete_face_flux(density.p, policy, grid, params);
    fc.flux_left = face.front();
    fc.flux_right = face.back();
    double scale = 0.0;
    for (int i = 0; i < grid.n_a; ++i)
        scale = std::max(scale, std::abs(policy.mu[i] * density.p[i]));
    fc.bound = kFluxRelTol * scale;
    fc.passed = std::abs(fc.mass - 1.0) <= kMassTol &&
                std::abs(fc.flux_left) <= fc.bound &&
                std::abs(fc.flux_right) <= fc.bound;
    return fc;
}

} // namespace

std::string effective_output_dir(const OutputSettings& outputs) {
    if (const char* env = std::getenv("WEALTHPDE_OUTPUT_DIR"); env && *env)
        return env;
    return outputs.directory;
}

RunResult run_diagnostics(const RunConfig& config, const PolicySolution& policy,
                          const std::optional<StationaryDensity>& density) {
    RunResult res;
    res.config = config;
    res.policy = policy;
    res.density = density;

    const Grid grid = config.make_grid();
    const ModelParams& econ = config.economics;

    if (!policy.trace.empty()) {
        res.m_matrix_ok_all = std::all_of(policy.trace.begin(), policy.trace.end(),
                                          [](const TraceRecord& t) { return t.m_matrix_ok; });
    } else {
        const UpwindOperator op = build_upwind_operator(policy.c, grid, econ);
        res.m_matrix_ok_all = check_m_matrix(op, econ.rho).ok;
    }

    bool all_passed = res.m_matrix_ok_all;

    if (!policy.converged) {
        const std::string why = "solver did not converge";
        if (config.checks.fpk_flux) res.skipped["fpk_flux"] = why;
        if (config.checks.w2) res.skipped["w2"] = why;
        if (config.checks.merton) res.skipped["merton"] = why;
        if (config.checks.mc_density) res.skipped["mc_density"] = why;
        res.diagnostics_passed = false;
        return res;
    }

    if (config.checks.fpk_flux) {
        if (!density) {
            res.skipped["fpk_flux"] = econ.sigma == 0.0
                                          ? "sigma = 0: no stationary density"
                                          : "no density available";
        } else {
            StageClock t;
            const FluxCheck fc = check_fpk_flux(*density, policy, grid, econ);
            res.wall_seconds["fpk_flux"] = t.seconds();
            StationaryDensity d = *density;
            d.mass = fc.mass;
            d.flux_left = fc.flux_left;
            d.flux_right = fc.flux_right;
            res.density = d;
            all_passed = all_passed && fc.passed;
        }
    }

    if (config.checks.w2) {
        if (econ.sigma == 0.0) {
            // Without noise the constrained policy pins every agent in
            // place, so the coupled distance is frozen and the contraction
            // ratio carries no information.
            res.skipped["w2"] = "sigma = 0: deterministic dynamics, coupling "
                                "distance not contracting";
        } else {
            StageClock t;
            res.w2 = w2_contraction_check(policy, grid, econ, config.simulation);
            res.wall_seconds["w2"] = t.seconds();
            all_passed = all_passed && res.w2->contracting;
        }
    }

    if (config.checks.merton) {
        StageClock t;
        res.merton = merton_validation(grid, econ, config.solver, config.postprocess);
        res.wall_seconds["merton"] = t.seconds();
        all_passed = all_passed && res.merton->converged &&
                     res.merton->rel_sup_error <= kMertonRelTol;
    }

    if (config.checks.mc_density) {
        if (!density) {
            res.skipped["mc_density"] = econ.sigma == 0.0
                                            ? "sigma = 0: no stationary density"
                                            : "no density available";
        } else {
            StageClock t;
            res.mc_density = monte_carlo_density_check(
                policy, *density, grid, econ, mc_density_defaults(config.simulation.seed));
            res.wall_seconds["mc_density"] = t.seconds();
            all_passed = all_passed && res.mc_density->l1_error <= kMcL1Tol;
        }
    }

    res.diagnostics_passed = all_passed;
    return res;
}

RunResult run_pipeline(const RunConfig& config) {
    config.validate();
    const Grid grid = config.make_grid();

    StageClock total;
    StageClock solve_clock;
    const PolicySolution policy =
        solve_hjb(grid, config.economics, config.solver, config.postprocess);
    const double solve_seconds = solve_clock.seconds();

    std::optional<StationaryDensity> density;
    double fpk_seconds = 0.0;
    std::string fpk_skip_reason;
    if (config.economics.sigma == 0.0) {
        fpk_skip_reason = "sigma = 0: stationary density not defined, skipping FPK solve";
    } else if (!policy.converged) {
        fpk_skip_reason = "solver did not converge";
    } else {
        StageClock t;
        density = solve_stationary(policy, grid, config.economics);
        fpk_seconds = t.seconds();
    }

    RunResult res = run_diagnostics(config, policy, density);
    res.wall_seconds["solve"] = solve_seconds;
    if (density) res.wall_seconds["fpk_solve"] = fpk_seconds;
    if (!fpk_skip_reason.empty()) res.skipped["fpk_solve"] = fpk_skip_reason;
    res.wall_seconds["total"] = total.seconds();
    return res;
}

std::string format_solution_csv(const PolicySolution& policy,
                                const std::optional<StationaryDensity>& density,
                                const Grid& grid) {
    std::ostringstream o;
    o << "a,V,c,mu,p\n";
    for (int i = 0; i < grid.n_a; ++i) {
        o << sci(grid.nodes[i]) << ',' << sci(policy.v[i]) << ',' << sci(policy.c[i])
          << ',' << sci(policy.mu[i]) << ',';
        if (density) o << sci(density->p[i]);
        o << '\n';
    }
    return o.str();
}

std::string format_trace_csv(const PolicySolution& policy) {
    std::ostringstream o;
    o << "iter,hjb_residual,foc_error,m_matrix_ok\n";
    for (const TraceRecord& t : policy.trace)
        o << t.iteration << ',' << sci(t.hjb_residual) << ',' << sci(t.foc_error)
          << ',' << (t.m_matrix_ok ? 1 : 0) << '\n';
    return o.str();
}

std::string format_report_json(const RunResult& result) {
    json j;
    j["seed"] = result.config.simulation.seed;
    j["converged"] = result.policy.converged;
    j["iterations"] = result.policy.iterations;
    if (!result.policy.trace.empty()) {
        j["final_foc_error"] = result.policy.trace.back().foc_error;
        j["final_hjb_residual"] = result.policy.trace.back().hjb_residual;
    }
    j["m_matrix_ok_all"] = result.m_matrix_ok_all;
    j["diagnostics_passed"] = result.diagnostics_passed;

    j["config"] = {
        {"r", result.config.economics.r},
        {"rho", result.config.economics.rho},
        {"gamma", result.config.economics.gamma},
        {"y", result.config.economics.y},
        {"sigma", result.config.economics.sigma},
        {"a_max", result.config.a_max},
        {"n_a", result.config.n_a},
        {"output_directory", result.config.outputs.directory},
    };

    json checks = json::object();
    const auto skip_reason = [&](const char* name) -> const std::string* {
        const auto it = result.skipped.find(name);
        return it == result.skipped.end() ? nullptr : &it->second;
    };

    if (!result.config.checks.fpk_flux) {
        checks["fpk_flux"] = {{"status", "disabled"}};
    } else if (const std::string* why = skip_reason("fpk_flux")) {
        checks["fpk_flux"] = {{"status", "skipped"}, {"reason", *why}};
    } else if (result.density) {
        double scale = 0.0;
        for (std::size_t i = 0; i < result.density->p.size(); ++i)
            scale = std::max(scale,
                             std::abs(result.policy.mu[i] * result.density->p[i]));
        const double bound = kFluxRelTol * scale;
        const bool ok = std::abs(result.density->mass - 1.0) <= kMassTol &&
                        std::abs(result.density->flux_left) <= bound &&
                        std::abs(result.density->flux_right) <= bound;
        checks["fpk_flux"] = {
            {"status", ok ? "passed" : "failed"},
            {"mass", result.density->mass},
            {"flux_left", result.density->flux_left},
            {"flux_right", result.density->flux_right},
            {"flux_bound", bound},
        };
    }

    if (!result.config.checks.w2) {
        checks["w2"] = {{"status", "disabled"}};
    } else if (const std::string* why = skip_reason("w2")) {
        checks["w2"] = {{"status", "skipped"}, {"reason", *why}};
    } else if (result.w2) {
        checks["w2"] = {
            {"status", result.w2->contracting ? "passed" : "failed"},
            {"median_ratio", result.w2->median_ratio},
            {"iqr_lo", result.w2->iqr_lo},
            {"iqr_hi", result.w2->iqr_hi},
            {"w2_initial", result.w2->w2_initial},
            {"w2_final", result.w2->w2_final},
            {"evolution_ratio", result.w2->evolution_ratio},
            {"contracting", result.w2->contracting},
            {"zero_distance_warnings", result.w2->zero_distance_warnings},
        };
    }

    if (!result.config.checks.merton) {
        checks["merton"] = {{"status", "disabled"}};
    } else if (const std::string* why = skip_reason("merton")) {
        checks["merton"] = {{"status", "skipped"}, {"reason", *why}};
    } else if (result.merton) {
        const bool ok =
            result.merton->converged && result.merton->rel_sup_error <= kMertonRelTol;
        checks["merton"] = {
            {"status", ok ? "passed" : "failed"},
            {"kappa", result.merton->kappa},
            {"regime", result.merton->regime == MertonRegime::constrained
                           ? "constrained"
                           : "interior"},
            {"rel_sup_error", result.merton->rel_sup_error},
        };
    }

    if (!result.config.checks.mc_density) {
        checks["mc_density"] = {{"status", "disabled"}};
    } else if (const std::string* why = skip_reason("mc_density")) {
        checks["mc_density"] = {{"status", "skipped"}, {"reason", *why}};
    } else if (result.mc_density) {
        checks["mc_density"] = {
            {"status", result.mc_density->l1_error <= kMcL1Tol ? "passed" : "failed"},
            {"l1_error", result.mc_density->l1_error},
            {"threshold", kMcL1Tol},
            {"pooled_samples", result.mc_density->pooled_samples},
        };
    }

    if (const std::string* why = skip_reason("fpk_solve"))
        j["notices"] = {{"fpk_solve", *why}};

    j["checks"] = checks;
    j["wall_seconds"] = result.wall_seconds;
    return j.dump(2) + "\n";
}

LoadedSolution parse_solution_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("solution", "solution csv: empty file");
    if (line != "a,V,c,mu,p")
        throw ConfigError("solution", "solution csv: unexpected header '" + line + "'");

    std::vector<double> a, v, c, mu, p;
    bool any_p = false, all_p = true;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (cells.size() != 5)
            throw ConfigError("solution", "solution csv line " + std::to_string(lineno) +
                                              ": expected 5 columns");
        const auto num = [&](const std::string& s) {
            try {
                return std::stod(s);
            } catch (const std::exception&) {
                throw ConfigError("solution", "solution csv line " +
                                                  std::to_string(lineno) +
                                                  ": bad number '" + s + "'");
            }
        };
        a.push_back(num(cells[0]));
        v.push_back(num(cells[1]));
        c.push_back(num(cells[2]));
        mu.push_back(num(cells[3]));
        if (cells[4].empty()) {
            all_p = false;
        } else {
            any_p = true;
            p.push_back(num(cells[4]));
        }
    }
    if (a.size() < 3) throw ConfigError("solution", "solution csv: fewer than 3 rows");
    if (any_p && !all_p)
        throw ConfigError("solution", "solution csv: p column must be full or empty");

    LoadedSolution out;
    out.grid = Grid::uniform(a.back(), static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - out.grid.nodes[i]) > 1e-9 * std::max(1.0, out.grid.a_max))
            throw ConfigError("solution", "solution csv: grid is not uniform at row " +
                                              std::to_string(i + 2));
    out.policy.v = std::move(v);
    out.policy.c = std::move(c);
    out.policy.mu = std::move(mu);
    out.policy.converged = true;  // emitted solutions come from converged runs
    out.policy.iterations = 0;
    if (any_p) {
        StationaryDensity d;
        d.p = std::move(p);
        const std::vector<double> w = quadrature_weights(out.grid);
        d.mass = 0.0;
        for (std::size_t i = 0; i < d.p.size(); ++i) d.mass += w[i] * d.p[i];
        out.density = d;
    }
    return out;
}

std::vector<std::string> emit_artifacts(const RunResult& result) {
    namespace fs = std::filesystem;
    const fs::path dir = result.config.outputs.directory;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("outputs.directory",
                          "cannot create output directory '" + dir.string() +
                              "': " + ec.message());

    const Grid grid = result.config.make_grid();
    std::vector<std::string> written;
    const auto put = [&](const fs::path& name, const std::string& content) {
        const fs::path full = dir / name;
        std::ofstream f(full, std::ios::binary);
        if (!f)
            throw ConfigError("outputs.directory",
                              "cannot write '" + full.string() + "'");
        f << content;
        written.push_back(full.string());
    };

    if (result.config.outputs.write_solution)
        put("solution.csv", format_solution_csv(result.policy, result.density, grid));
    if (result.config.outputs.write_trace)
        put("trace.csv", format_trace_csv(result.policy));
    if (result.config.outputs.write_report)
        put("report.json", format_report_json(result));
    return written;
}

} // namespace wealthpde
