#pragma once

#include <stdexcept>
#include <string>

namespace wealthpde {

/// Linear algebra or iteration failure inside a solver (non-M matrix,
/// singular system, non-finite intermediate).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A configuration that the implementation deliberately refuses
/// (e.g. stationary density with sigma = 0).
class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file / config value rejection. Carries the offending key so the
/// CLI can name it.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error(what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

} // namespace wealthpde
