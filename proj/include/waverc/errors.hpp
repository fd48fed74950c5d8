#pragma once

#include <stdexcept>
#include <string>

namespace waverc {

/// Bad configuration values or malformed config files. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem problems (missing files, unwritable paths). CLI exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite losses, divergent iterations and the like. CLI exit code 4.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace waverc
