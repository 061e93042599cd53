#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wealthpde/errors.hpp"
#include "wealthpde/pipeline.hpp"

namespace {

using namespace wealthpde;

struct Overrides {
    std::optional<double> r, rho, gamma, y, sigma, a_max, tol_foc, tol_hjb, relaxation;
    std::optional<int> n_a, max_iter;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

void add_override_flags(CLI::App& cmd, std::string& config_path, Overrides& ov) {
    cmd.add_option("--config", config_path, "config file (omit for built-in defaults)");
    cmd.add_option("--r", ov.r, "interest rate");
    cmd.add_option("--rho", ov.rho, "discount rate");
    cmd.add_option("--gamma", ov.gamma, "relative risk aversion");
    cmd.add_option("--y", ov.y, "labor income");
    cmd.add_option("--sigma", ov.sigma, "wealth volatility");
    cmd.add_option("--a-max", ov.a_max, "wealth grid upper bound");
    cmd.add_option("--n-a", ov.n_a, "grid point count");
    cmd.add_option("--tol-foc", ov.tol_foc, "policy convergence tolerance");
    cmd.add_option("--tol-hjb", ov.tol_hjb, "residual convergence tolerance");
    cmd.add_option("--max-iter", ov.max_iter, "iteration budget");
    cmd.add_option("--relaxation", ov.relaxation, "policy update damping in (0,1]");
    cmd.add_option("--seed", ov.seed, "simulation seed");
    cmd.add_option("--out", ov.out_dir, "output directory (overrides config and environment)");
}

RunConfig resolve_config(const std::string& config_path, const Overrides& ov) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (ov.r) cfg.economics.r = *ov.r;
    if (ov.rho) cfg.economics.rho = *ov.rho;
    if (ov.gamma) cfg.economics.gamma = *ov.gamma;
    if (ov.y) cfg.economics.y = *ov.y;
    if (ov.sigma) cfg.economics.sigma = *ov.sigma;
    if (ov.a_max) cfg.a_max = *ov.a_max;
    if (ov.n_a) cfg.n_a = *ov.n_a;
    if (ov.tol_foc) cfg.solver.tol_foc = *ov.tol_foc;
    if (ov.tol_hjb) cfg.solver.tol_hjb = *ov.tol_hjb;
    if (ov.max_iter) cfg.solver.max_iter = *ov.max_iter;
    if (ov.relaxation) cfg.solver.relaxation = *ov.relaxation;
    if (ov.seed) cfg.simulation.seed = *ov.seed;
    cfg.outputs.directory = ov.out_dir ? *ov.out_dir : effective_output_dir(cfg.outputs);
    cfg.validate();
    return cfg;
}

void print_summary(const RunResult& res) {
    std::printf("converged          %s (%d iterations)\n",
                res.policy.converged ? "yes" : "no", res.policy.iterations);
    if (!res.policy.trace.empty()) {
        std::printf("final foc_error    %.3e\n", res.policy.trace.back().foc_error);
        std::printf("final hjb_residual %.3e\n", res.policy.trace.back().hjb_residual);
    }
    std::printf("m_matrix_ok_all    %s\n", res.m_matrix_ok_all ? "yes" : "no");
    if (res.density)
        std::printf("density mass       %.12f  boundary flux (%.2e, %.2e)\n",
                    res.density->mass, res.density->flux_left, res.density->flux_right);
    if (res.w2)
        std::printf("w2 median ratio    %.6f  evolution ratio %.6f  contracting %s\n",
                    res.w2->median_ratio, res.w2->evolution_ratio,
                    res.w2->contracting ? "yes" : "no");
    if (res.merton)
        std::printf("merton rel error   %.3e (kappa %.4f, %s)\n",
                    res.merton->rel_sup_error, res.merton->kappa,
                    res.merton->regime == MertonRegime::constrained ? "constrained"
                                                                    : "interior");
    if (res.mc_density)
        std::printf("mc density L1      %.4f\n", res.mc_density->l1_error);
    for (const auto& [check, why] : res.skipped)
        std::printf("skipped %-10s %s\n", check.c_str(), why.c_str());
    std::printf("diagnostics_passed %s\n", res.diagnostics_passed ? "yes" : "no");
}

int cmd_solve(const std::string& config_path, const Overrides& ov) {
    const RunConfig cfg = resolve_config(config_path, ov);
    const RunResult res = run_pipeline(cfg);
    const std::vector<std::string> written = emit_artifacts(res);
    print_summary(res);
    for (const std::string& p : written) std::printf("wrote %s\n", p.c_str());
    if (!res.policy.converged) return exit_not_converged;
    if (!res.diagnostics_passed) return exit_diagnostic_failure;
    return exit_ok;
}

int cmd_validate(const std::string& config_path, const Overrides& ov,
                 const std::string& solution_path) {
    RunConfig cfg = resolve_config(config_path, ov);

    std::ifstream f(solution_path, std::ios::binary);
    if (!f) throw ConfigError("solution", "cannot read '" + solution_path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    const LoadedSolution loaded = parse_solution_csv(buf.str());

    // The file's grid wins over whatever the config says.
    cfg.a_max = loaded.grid.a_max;
    cfg.n_a = loaded.grid.n_a;
    cfg.validate();

    RunResult res = run_diagnostics(cfg, loaded.policy, loaded.density);
    res.config.outputs.write_solution = false;
    res.config.outputs.write_trace = false;
    const std::vector<std::string> written = emit_artifacts(res);
    print_summary(res);
    for (const std::string& p : written) std::printf("wrote %s\n", p.c_str());
    return res.diagnostics_passed ? exit_ok : exit_diagnostic_failure;
}

int cmd_merton(const std::string& config_path, const Overrides& ov) {
    const RunConfig cfg = resolve_config(config_path, ov);
    const int sweep[] = {60, 120, 240, 480};

    std::printf("%6s  %10s  %-11s  %14s  %s\n", "n_a", "kappa", "regime",
                "rel_sup_error", "converged");
    bool all_converged = true;
    double err_240 = -1.0;
    for (const int n_a : sweep) {
        const Grid grid = Grid::uniform(cfg.a_max, n_a);
        const MertonReport rep =
            merton_validation(grid, cfg.economics, cfg.solver, cfg.postprocess);
        std::printf("%6d  %10.6f  %-11s  %14.6e  %s\n", n_a, rep.kappa,
                    rep.regime == MertonRegime::constrained ? "constrained" : "interior",
                    rep.rel_sup_error, rep.converged ? "yes" : "no");
        all_converged = all_converged && rep.converged;
        if (n_a == 240) err_240 = rep.rel_sup_error;
    }
    if (!all_converged) return exit_not_converged;
    return err_240 <= 1e-3 ? exit_ok : exit_diagnostic_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous-time consumption-savings solver"};
    app.require_subcommand(1);

    std::string config_path;
    std::string solution_path;
    Overrides ov;

    CLI::App* solve = app.add_subcommand("solve", "run the full pipeline");
    add_override_flags(*solve, config_path, ov);

    CLI::App* validate =
        app.add_subcommand("validate", "run diagnostics on an emitted solution");
    add_override_flags(*validate, config_path, ov);
    validate->add_option("--solution", solution_path, "solution csv to validate")
        ->required();

    CLI::App* merton = app.add_subcommand("merton", "deterministic closed-form check "
                                                    "across grid refinements");
    add_override_flags(*merton, config_path, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_config_error;
    }

    try {
        if (solve->parsed()) return cmd_solve(config_path, ov);
        if (validate->parsed()) return cmd_validate(config_path, ov, solution_path);
        if (merton->parsed()) return cmd_merton(config_path, ov);
        std::fprintf(stderr, "error: no subcommand\n");
        return exit_config_error;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config_error;
    } catch (const UnsupportedError& e) {
        std::fprintf(stderr, "unsupported: %s\n", e.what());
        return exit_config_error;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return exit_internal_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return exit_internal_error;
    }
}
