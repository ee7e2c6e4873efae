#pragma once

#include <stdexcept>
#include <string>

namespace goblend {

// Bad input files, unknown config keys, inconsistent experiment settings.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed data rows; message carries file and line.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller broke a documented precondition (tick after terminal, bad action value, ...).
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Not enough data to compute a statistic (e.g. target trace needs >= 2 sessions).
struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace goblend
