#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "necrotic/errors.hpp"

namespace necrotic {

/// Fourier differentiation of periodic samples on x_j = 2 pi j / m.
/// The Nyquist coefficient is dropped for odd orders and kept for even ones.
inline std::vector<double> spectral_derivative(std::span<const double> values, int order) {
  const std::size_t m = values.size();
  if (order == 0) return {values.begin(), values.end()};
  Eigen::FFT<double> fft;
  std::vector<double> in(values.begin(), values.end());
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);
  const auto half = static_cast<long>(m / 2);
  for (std::size_t j = 0; j < m; ++j) {
    long wave = static_cast<long>(j);
    if (wave > half) wave -= static_cast<long>(m);
    std::complex<double> factor = std::pow(std::complex<double>(0.0, static_cast<double>(wave)), order);
    if (m % 2 == 0 && wave == half && order % 2 == 1) factor = 0.0;
    spec[j] *= factor;
  }
  std::vector<double> out;
  fft.inv(out, spec);
  return out;
}

/// Periodic boundary graph y = rho(x) sampled on x_j = 2 pi j / m.
class BoundaryCurve {
 public:
  explicit BoundaryCurve(std::vector<double> samples) : samples_(std::move(samples)) {
    const std::size_t m = samples_.size();
    if (m < 8 || m % 2 != 0) throw DomainError("BoundaryCurve: m must be even and >= 8");
    for (double v : samples_) {
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("BoundaryCurve: samples must be positive");
    }
  }

  static BoundaryCurve from_function(int m, const std::function<double(double)>& rho) {
    std::vector<double> s(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) s[j] = rho(node(j, m));
    return BoundaryCurve(std::move(s));
  }

  static BoundaryCurve constant(int m, double height) {
    return BoundaryCurve(std::vector<double>(static_cast<std::size_t>(m), height));
  }

  static double node(int j, int m) { return 2.0 * std::numbers::pi * j / m; }

  int size() const { return static_cast<int>(samples_.size()); }
  double operator[](int j) const { return samples_[static_cast<std::size_t>(j)]; }
  std::span<const double> samples() const { return samples_; }

  std::vector<double> derivative(int order) const { return spectral_derivative(samples_, order); }

  /// Rigid vertical shift by `amount`.
  BoundaryCurve raised(double amount) const {
    std::vector<double> s = samples_;
    for (double& v : s) v += amount;
    return BoundaryCurve(std::move(s));
  }

  /// rho + eps * direction, with direction sampled on the same nodes.
  BoundaryCurve perturbed(std::span<const double> direction, double eps) const {
    if (direction.size() != samples_.size()) throw DomainError("BoundaryCurve: size mismatch");
    std::vector<double> s = samples_;
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += eps * direction[j];
    return BoundaryCurve(std::move(s));
  }

 private:
  std::vector<double> samples_;
};

/// kappa = -rho'' / (1 + rho'^2)^(3/2); positive at a strict local maximum.
inline std::vector<double> curvature(const BoundaryCurve& rho) {
  const std::vector<double> d1 = rho.derivative(1);
  std::vector<double> kappa = rho.derivative(2);
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    kappa[j] = -kappa[j] / std::pow(1.0 + d1[j] * d1[j], 1.5);
  }
  return kappa;
}

}  // namespace necrotic
