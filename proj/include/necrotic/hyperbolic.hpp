#pragma once

#include <cmath>

// Overflow-free ratios of hyperbolic functions. Arguments of the form
// delta*sqrt(1+k^2) exceed the double range of cosh near k ~ 380, so every
// ratio is rewritten as exp(a - b) times factors bounded by 2.

namespace necrotic::hyp {

inline double sech(double x) {
  const double ax = std::fabs(x);
  const double e = std::exp(-ax);
  return 2.0 * e / (1.0 + e * e);
}

/// 1/sinh(x) for x > 0.
inline double csch(double x) {
  const double e = std::exp(-x);
  return 2.0 * e / (-std::expm1(-2.0 * x));
}

/// 1 - tanh(x) for x >= 0, without cancellation.
inline double one_minus_tanh(double x) {
  const double e = std::exp(-2.0 * x);
  return 2.0 * e / (1.0 + e);
}

/// cosh(a)/cosh(b), a, b >= 0.
inline double cosh_over_cosh(double a, double b) {
  return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

/// sinh(a)/cosh(b), a, b >= 0.
inline double sinh_over_cosh(double a, double b) {
  return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

/// cosh(a)/sinh(b), a >= 0, b > 0.
inline double cosh_over_sinh(double a, double b) {
  return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

/// coth(x) for x > 0.
inline double coth(double x) {
  const double e = std::exp(-2.0 * x);
  return (1.0 + e) / (-std::expm1(-2.0 * x));
}

}  // namespace necrotic::hyp
