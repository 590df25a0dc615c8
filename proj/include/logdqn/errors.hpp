#pragma once

#include <stdexcept>
#include <string>

namespace logdqn {

// Error taxonomy used across the library. The CLI maps usage problems to
// exit code 1 and any of these to exit code 2.

/// Filesystem-level failure (missing file, unreadable stream, short write).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value or combination (bad adapter name, bad bounds).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data; the message names the offending location.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke an API precondition.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Numerical breakdown (non-finite gradients or losses) that would silently
/// corrupt training if allowed through.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace logdqn
