#pragma once

#include <stdexcept>
#include <string>

namespace krsel {

// Bad user input: malformed config, invalid prior, dimension mismatch.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Floating-point trouble that survived the built-in fallbacks
// (factorization failure, non-finite Gram entries, ...).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace krsel
