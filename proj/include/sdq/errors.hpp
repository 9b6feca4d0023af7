#pragma once

#include <stdexcept>
#include <string>

namespace sdq {

/// Rejected input: parameter or grid violates a documented precondition.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Computation failed numerically (overflow, divergence, tolerance breach).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sdq
