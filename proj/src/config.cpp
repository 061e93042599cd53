#include "wealthpde/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wealthpde/errors.hpp"

namespace wealthpde {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, key + ": '" + v + "' is not a real number");
    }
}

int to_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError(key, key + ": '" + v + "' is not an integer");
    }
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw ConfigError(key, key + ": '" + v + "' is not an unsigned integer");
    }
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key, key + ": '" + v + "' is not a boolean (true/false)");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void apply(RunConfig& c, const std::string& section, const std::string& key,
           const std::string& value, const std::string& origin) {
    const std::string qual = section + "." + key;
    if (section == "economics") {
        if (key == "r") c.economics.r = to_double(value, qual);
        else if (key == "rho") c.economics.rho = to_double(value, qual);
        else if (key == "gamma") c.economics.gamma = to_double(value, qual);
        else if (key == "y") c.economics.y = to_double(value, qual);
        else if (key == "sigma") c.economics.sigma = to_double(value, qual);
        else throw ConfigError(qual, origin + ": unknown key '" + qual + "'");
    } else if (section == "grid") {
        if (key == "a_max") c.a_max = to_double(value, qual);
        else if (key == "n_a") c.n_a = to_int(value, qual);
        else throw ConfigError(qual, origin + ": unknown key '" + qual + "'");
    } else if (section == "solver") {
        if (key == "tol_foc") c.solver.tol_foc = to_double(value, qual);
        else if (key == "tol_hjb") c.solver.tol_hjb = to_double(value, qual);
        else if (key == "max_iter") c.solver.max_iter = to_int(value, qual);
        else if (key == "relaxation") c.solver.relaxation = to_double(value, qual);
        else if (key == "init_fraction") c.solver.init_fraction = to_double(value, qual);
        else if (key == "enforce_mu_nonneg_sigma0")
            c.solver.enforce_mu_nonneg_sigma0 = to_bool(value, qual);
        else throw ConfigError(qual, origin + ": unknown key '" + qual + "'");
    } else if (section == "postprocess") {
        if (key == "enabled") c.postprocess.enabled = to_bool(value, qual);
        else if (key == "smoothing_passes")
            c.postprocess.smoothing_passes = to_int(value, qual);
        else if (key == "window") c.postprocess.window = to_int(value, qual);
        else if (key == "slope_lo") c.postprocess.slope_lo = to_double(value, qual);
        else if (key == "slope_hi") c.postprocess.slope_hi = to_double(value, qual);
        else throw ConfigError(qual, origin + ": unknown key '" + qual + "'");
    } else if (section == "simulation") {
        if (key == "n_agents") c.simulation.n_agents = to_int(value, qual);
        else if (key == "dt") c.simulation.dt = to_double(value, qual);
        else if (key == "n_steps") c.simulation.n_steps = to_int(value, qual);
        else if (key == "seed") c.simulation.seed = to_u64(value, qual);
        else if (key == "burn_in") c.simulation.burn_in = to_int(value, qual);
        else if (key == "reflect_boundaries")
            c.simulation.reflect_boundaries = to_bool(value, qual);
        else throw ConfigError(qual, origin + ": unknown key '" + qual + "'");
    } else if (section == "outputs") {
        if (key == "directory") c.outputs.directory = value;
        else if (key == "write_solution") c.outputs.write_solution = to_bool(value, qual);
        else if (key == "write_trace") c.outputs.write_trace = to_bool(value, qual);
        else if (key == "write_report") c.outputs.write_report = to_bool(value, qual);
        else throw ConfigError(qual, origin + ": unknown key '" + qual + "'");
    } else if (section == "checks") {
        if (key == "w2") c.checks.w2 = to_bool(value, qual);
        else if (key == "merton") c.checks.merton = to_bool(value, qual);
        else if (key == "mc_density") c.checks.mc_density = to_bool(value, qual);
        else if (key == "fpk_flux") c.checks.fpk_flux = to_bool(value, qual);
        else throw ConfigError(qual, origin + ": unknown key '" + qual + "'");
    } else {
        throw ConfigError(section, origin + ": unknown section '[" + section + "]'");
    }
}

} // namespace

void RunConfig::validate() const {
    const auto rethrow = [](const char* section, const std::exception& e) {
        throw ConfigError(section, std::string(section) + "." + e.what());
    };
    try {
        economics.validate();
    } catch (const std::invalid_argument& e) {
        rethrow("economics", e);
    }
    if (!(a_max > 0.0)) throw ConfigError("grid.a_max", "grid.a_max: must be > 0");
    if (n_a < 3) throw ConfigError("grid.n_a", "grid.n_a: must be >= 3");
    try {
        solver.validate();
    } catch (const std::invalid_argument& e) {
        rethrow("solver", e);
    }
    try {
        postprocess.validate();
    } catch (const std::invalid_argument& e) {
        rethrow("postprocess", e);
    }
    try {
        simulation.validate();
    } catch (const std::invalid_argument& e) {
        rethrow("simulation", e);
    }
    if (outputs.directory.empty())
        throw ConfigError("outputs.directory", "outputs.directory: must not be empty");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin, origin + ":" + std::to_string(lineno) +
                                              ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin, origin + ":" + std::to_string(lineno) +
                                          ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(key, origin + ":" + std::to_string(lineno) + ": key '" +
                                       key + "' appears before any [section]");
        apply(cfg, section, key, value, origin);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    o << "[economics]\n";
    o << "r = " << fmt(c.economics.r) << "\n";
    o << "rho = " << fmt(c.economics.rho) << "\n";
    o << "gamma = " << fmt(c.economics.gamma) << "\n";
    o << "y = " << fmt(c.economics.y) << "\n";
    o << "sigma = " << fmt(c.economics.sigma) << "\n\n";
    o << "[grid]\n";
    o << "a_max = " << fmt(c.a_max) << "\n";
    o << "n_a = " << c.n_a << "\n\n";
    o << "[solver]\n";
    o << "tol_foc = " << fmt(c.solver.tol_foc) << "\n";
    o << "tol_hjb = " << fmt(c.solver.tol_hjb) << "\n";
    o << "max_iter = " << c.solver.max_iter << "\n";
    o << "relaxation = " << fmt(c.solver.relaxation) << "\n";
    o << "init_fraction = " << fmt(c.solver.init_fraction) << "\n";
    o << "enforce_mu_nonneg_sigma0 = "
      << (c.solver.enforce_mu_nonneg_sigma0 ? "true" : "false") << "\n\n";
    o << "[postprocess]\n";
    o << "enabled = " << (c.postprocess.enabled ? "true" : "false") << "\n";
    o << "smoothing_passes = " << c.postprocess.smoothing_passes << "\n";
    o << "window = " << c.postprocess.window << "\n";
    o << "slope_lo = " << fmt(c.postprocess.slope_lo) << "\n";
    o << "slope_hi = " << fmt(c.postprocess.slope_hi) << "\n\n";
    o << "[simulation]\n";
    o << "n_agents = " << c.simulation.n_agents << "\n";
    o << "dt = " << fmt(c.simulation.dt) << "\n";
    o << "n_steps = " << c.simulation.n_steps << "\n";
    o << "seed = " << c.simulation.seed << "\n";
    o << "burn_in = " << c.simulation.burn_in << "\n";
    o << "reflect_boundaries = "
      << (c.simulation.reflect_boundaries ? "true" : "false") << "\n\n";
    o << "[outputs]\n";
    o << "directory = " << c.outputs.directory << "\n";
    o << "write_solution = " << (c.outputs.write_solution ? "true" : "false") << "\n";
    o << "write_trace = " << (c.outputs.write_trace ? "true" : "false") << "\n";
    o << "write_report = " << (c.outputs.write_report ? "true" : "false") << "\n\n";
    o << "[checks]\n";
    o << "w2 = " << (c.checks.w2 ? "true" : "false") << "\n";
    o << "merton = " << (c.checks.merton ? "true" : "false") << "\n";
    o << "mc_density = " << (c.checks.mc_density ? "true" : "false") << "\n";
    o << "fpk_flux = " << (c.checks.fpk_flux ? "true" : "false") << "\n";
    return o.str();
}

} // namespace wealthpde
