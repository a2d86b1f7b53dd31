#pragma once

#include <stdexcept>
#include <string>

namespace nhcz {

/// Violated hypothesis on numeric parameters (alpha, beta, rho, p, ...).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed input data: mismatched lengths, invalid indices, broken containment.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// A construction that cannot be completed on the given instance.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nhcz
