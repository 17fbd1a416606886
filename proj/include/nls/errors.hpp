#pragma once

#include <stdexcept>
#include <string>

namespace nls {

// Validation failures (bad config keys, out-of-range arguments). CLI exit 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime failures (non-convergence, I/O). CLI exit 2.
struct SolverError : std::runtime_error {
    SolverError(const std::string& msg, double last_residual_)
        : std::runtime_error(msg), last_residual(last_residual_) {}
    double last_residual;
};

struct IoError : std::runtime_error {
    enum class Kind { bad_magic, bad_version, truncated_payload, write_failure, other };
    IoError(Kind kind_, const std::string& msg) : std::runtime_error(msg), kind(kind_) {}
    Kind kind;
};

}  // namespace nls
