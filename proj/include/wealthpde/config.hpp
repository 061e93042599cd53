#pragma once

#include <string>

#include "wealthpde/diagnostics.hpp"
#include "wealthpde/hjb.hpp"
#include "wealthpde/model.hpp"
#include "wealthpde/postprocess.hpp"

namespace wealthpde {

struct OutputSettings {
    std::string directory = "wealthpde_out";  // overridable via WEALTHPDE_OUTPUT_DIR
    bool write_solution = true;
    bool write_trace = true;
    bool write_report = true;

    bool operator==(const OutputSettings&) const = default;
};

struct CheckSettings {
    bool w2 = true;
    bool merton = true;
    bool mc_density = true;
    bool fpk_flux = true;

    bool operator==(const CheckSettings&) const = default;
};

/// Full run configuration. Defaults reproduce the baseline calibration
/// (r=0.03, rho=0.04, gamma=2, y=1, sigma=0.22, a_max=20, n_a=240, ...).
struct RunConfig {
    ModelParams economics;
    double a_max = 20.0;
    int n_a = 240;
    SolverSettings solver;
    PostprocessSettings postprocess;
    SimulationSettings simulation;
    OutputSettings outputs;
    CheckSettings checks;

    Grid make_grid() const { return Grid::uniform(a_max, n_a); }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parse the sectioned key-value format:
///   [economics]
///   r = 0.03
/// Unknown sections or keys raise ConfigError naming the offender; so do
/// malformed values. Blank lines and #/; comments are ignored. Every key
/// is optional; absent keys keep their defaults.
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

/// parse_config over a file's contents. Missing file raises ConfigError.
RunConfig load_config(const std::string& path);

/// Render a config in the same format; parse_config(serialize_config(c))
/// compares equal to c.
std::string serialize_config(const RunConfig& config);

} // namespace wealthpde
