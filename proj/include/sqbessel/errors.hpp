#pragma once

#include <stdexcept>
#include <string>

namespace sqbessel {

// Argument outside the domain of a function (negative w, delta <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative method (root finder, quadrature, series) failed to reach
// its tolerance within the iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// No loaded Chebyshev patch covers the requested degrees of freedom.
class CoverageError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed, inconsistent or corrupted coefficient file.
class PatchFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Chebyshev fit could not reach the target within the order cap.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sqbessel
