#pragma once

#include <stdexcept>
#include <string>

namespace sbx {

/// A parameter is outside the domain where a formula is defined.
/// The message names the violated constraint.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A series or quadrature hit its work limit before meeting the tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sbx
