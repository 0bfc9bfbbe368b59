#pragma once

#include <stdexcept>
#include <string>

namespace moqa {

// Bad input files, malformed JSON, inconsistent CLI/config combinations.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A resource cap was hit: enumeration size 2^n above the configured limit,
// or a symbolic expansion whose projected term count exceeds the budget.
class CapError : public std::runtime_error {
  public:
    explicit CapError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerically ill-posed request: gap ratio on an unshifted or constant
// landscape, a vanishing relative-error denominator, or overflow to a
// non-finite value.
class DegeneracyError : public std::runtime_error {
  public:
    explicit DegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace moqa
