#pragma once

#include <map>
#include <optional>
#include <string>

#include "wealthpde/config.hpp"
#include "wealthpde/diagnostics.hpp"
#include "wealthpde/fpk.hpp"
#include "wealthpde/hjb.hpp"

namespace wealthpde {

/// Process exit codes of the command line driver.
enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_not_converged = 3,
    exit_diagnostic_failure = 4,
    exit_internal_error = 5,
};

/// Everything one solve-plus-diagnostics run produced.
struct RunResult {
    RunConfig config;
    PolicySolution policy;
    std::optional<StationaryDensity> density;  // absent when sigma == 0
    std::optional<W2Report> w2;
    std::optional<MertonReport> merton;
    std::optional<McDensityReport> mc_density;
    bool m_matrix_ok_all = false;
    bool diagnostics_passed = false;
    std::map<std::string, double> wall_seconds;       // per-stage timings
    std::map<std::string, std::string> skipped;       // check -> reason
};

/// Solve, then run the enabled diagnostics. Nothing is written to disk.
RunResult run_pipeline(const RunConfig& config);

/// Diagnostics over an already computed solution (the `validate` path).
/// Fills every RunResult field except the solve trace.
RunResult run_diagnostics(const RunConfig& config, const PolicySolution& policy,
                          const std::optional<StationaryDensity>& density);

/// "a,V,c,mu,p" rows, full-precision scientific notation; the p column is
/// empty when no density is present.
std::string format_solution_csv(const PolicySolution& policy,
                                const std::optional<StationaryDensity>& density,
                                const Grid& grid);

/// "iter,hjb_residual,foc_error,m_matrix_ok" rows.
std::string format_trace_csv(const PolicySolution& policy);

/// report.json payload: convergence stats, diagnostic outcomes (skipped
/// checks marked), seed, wall-clock timings.
std::string format_report_json(const RunResult& result);

/// Parse a solution.csv back into a policy (+ density when the p column
/// is populated). Throws ConfigError on malformed content.
struct LoadedSolution {
    Grid grid;
    PolicySolution policy;
    std::optional<StationaryDensity> density;
};
LoadedSolution parse_solution_csv(const std::string& text);

/// Write solution/trace/report into config.outputs.directory (created if
/// needed), honoring the write_* switches. Returns the paths written.
std::vector<std::string> emit_artifacts(const RunResult& result);

/// Effective output directory: the WEALTHPDE_OUTPUT_DIR environment
/// variable overrides the configured default; an explicit CLI flag should
/// override both (applied by the caller).
std::string effective_output_dir(const OutputSettings& outputs);

} // namespace wealthpde
