#pragma once

#include <stdexcept>
#include <string>

namespace bsdiv {

// Bad inputs: malformed specs, violated preconditions, out-of-domain arguments.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A point lies outside the closed generator domain.
class DomainError : public ConfigError {
 public:
  explicit DomainError(const std::string& what) : ConfigError(what) {}
};

// Evaluation failed: non-finite intermediates, broken invariants, no convergence.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bsdiv
