#pragma once

#include <stdexcept>
#include <string>

namespace necrotic {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation called for a case it does not cover (e.g. k = 0 on a k >= 1 formula).
class MisuseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fourier mode coefficients violating a_k d_k = b_k c_k or nontriviality.
class InvalidModeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pure-Neumann problem whose data fail the compatibility condition.
class UnsolvableError : public std::runtime_error {
 public:
  UnsolvableError(const std::string& what, double defect)
      : std::runtime_error(what), defect_(defect) {}

  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// Linear solve breakdown; carries the residual that was observed.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace necrotic
