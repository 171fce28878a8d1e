#pragma once

#include <stdexcept>
#include <string>

namespace tailreg {

/// Argument outside the mathematical domain of an operation (mean outside the
/// family's mean-domain, unreachable tilt target, support violation, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a precondition (bad ordering of means, negative b, T > 20 for
/// the enumeration oracle, malformed configuration).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace tailreg
