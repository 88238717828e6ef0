#pragma once

#include <stdexcept>
#include <string>

namespace chaoscope {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent configuration (bad windows, bad thresholds).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Operands live in different declared spaces.
struct IncompatibleSpaceError : Error {
    explicit IncompatibleSpaceError(const std::string& msg) : Error(msg) {}
};

/// Malformed operator/vector spec (JSON or inline).
struct SpecError : Error {
    explicit SpecError(const std::string& msg) : Error(msg) {}
};

/// Requested a closed-form orbit for a kind that has none.
struct UnsupportedOracleError : Error {
    explicit UnsupportedOracleError(const std::string& msg) : Error(msg) {}
};

/// Rejected input (duplicate family points, zero criterion seed, ...).
struct RejectedInputError : Error {
    explicit RejectedInputError(const std::string& msg) : Error(msg) {}
};

}  // namespace chaoscope
