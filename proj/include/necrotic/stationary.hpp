#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "necrotic/errors.hpp"

namespace necrotic {

/// Physical constants of the necrotic strip model.
struct ModelParams {
  double sigma_bar = 2.0;    // nutrient supply on the upper interface
  double sigma_tilde = 1.0;  // proliferation threshold
  double mu = 1.0;           // aggressiveness

  /// Throws DomainError unless sigma_bar > sigma_tilde > 0 and mu > 0.
  void validate() const {
    if (!std::isfinite(sigma_bar) || !std::isfinite(sigma_tilde) || !std::isfinite(mu)) {
      throw DomainError("model parameters must be finite");
    }
    if (!(sigma_tilde > 0.0)) throw DomainError("sigma_tilde must be positive");
    if (!(sigma_bar > sigma_tilde)) throw DomainError("sigma_bar must exceed sigma_tilde");
    if (!(mu > 0.0)) throw DomainError("mu must be positive");
  }

  double ratio() const { return sigma_tilde / sigma_bar; }
};

namespace detail {

// tanh(d)/d and its derivative, with series near zero where the direct
// derivative formula cancels.
inline double tanhc(double d) {
  if (d < 1e-4) return 1.0 - d * d / 3.0 + 2.0 * d * d * d * d / 15.0;
  return std::tanh(d) / d;
}

inline double tanhc_prime(double d) {
  if (d < 1e-2) {
    const double d2 = d * d;
    return d * (-2.0 / 3.0 + d2 * (8.0 / 15.0 - d2 * 102.0 / 315.0));
  }
  const double s = 1.0 / std::cosh(d);
  return (d * s * s - std::tanh(d)) / (d * d);
}

// 1 - cosh(d) + d sinh(d)/2 = sum_{j>=2} (j-1) d^{2j} / (2j)!
inline double necrosis_bracket(double d) {
  if (d >= 1.0) return 1.0 - std::cosh(d) + 0.5 * d * std::sinh(d);
  const double d2 = d * d;
  double term = d2 * d2 / 24.0;  // d^4/4!
  double sum = term;
  for (int j = 3; j < 30; ++j) {
    term *= d2 / ((2.0 * j - 1.0) * (2.0 * j));
    const double add = (j - 1) * term;
    sum += add;
    if (add < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace detail

/// Largest ratio accepted by solve_delta; closer to 1 the root is too small
/// for the mode formulas, which divide by sinh(delta k).
inline constexpr double kMaxDeltaRatio = 1.0 - 1e-10;

/// Unique positive root of tanh(delta)/delta = ratio, ratio in (0, 1).
inline double solve_delta(double ratio) {
  if (!(ratio > 0.0) || !(ratio < 1.0)) {
    throw DomainError("solve_delta: ratio must lie in (0, 1)");
  }
  if (ratio > kMaxDeltaRatio) {
    throw DomainError("solve_delta: ratio too close to 1 (degenerate delta -> 0)");
  }
  auto g = [ratio](double d) { return detail::tanhc(d) - ratio; };

  // g is strictly decreasing: positive at lo, negative at hi.
  double lo = 1e-8;
  double hi = std::fmax(50.0, 10.0 / ratio);
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  double d = 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    const double step = g(d) / detail::tanhc_prime(d);
    double next = d - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    (g(next) > 0.0 ? lo : hi) = next;
    if (std::fabs(next - d) <= 1e-16 * next) {
      d = next;
      break;
    }
    d = next;
  }
  return d;
}

/// Pressure offset c on the necrotic interface; positive for every delta > 0.
inline double necrosis_constant(const ModelParams& params, double delta) {
  if (!(delta > 0.0)) throw DomainError("necrosis_constant: delta must be positive");
  return params.mu * params.sigma_bar / std::cosh(delta) * detail::necrosis_bracket(delta);
}

/// Flat equilibrium (rho1*, rho1* + delta) with its nutrient and pressure profiles.
///
/// The profile members are the analytic continuations of sigma* and p* to the
/// whole real line and perform no domain check; the free functions sigma_star
/// and p_star restrict to the tumor layer.
class FlatStationary {
 public:
  FlatStationary(const ModelParams& params, double rho1_star, double delta, double c_value)
      : params_(params), rho1_(rho1_star), delta_(delta), c_(c_value) {}

  const ModelParams& params() const { return params_; }
  double rho1_star() const { return rho1_; }
  double rho2_star() const { return rho1_ + delta_; }
  double delta() const { return delta_; }
  double c_value() const { return c_; }

  // sigma*(y) = sigma_bar cosh(y - rho1*) / cosh(delta)
  double sigma(double y) const {
    return params_.sigma_bar * std::cosh(y - rho1_) / std::cosh(delta_);
  }
  double sigma_prime(double y) const {
    return params_.sigma_bar * std::sinh(y - rho1_) / std::cosh(delta_);
  }
  double sigma_second(double y) const { return sigma(y); }

  // p*(y) = mu (sigma_bar - sigma*(y)) - mu sigma_tilde (delta^2 - t^2) / 2,  t = y - rho1*
  double pressure(double y) const {
    const double t = y - rho1_;
    return params_.mu * (params_.sigma_bar - sigma(y)) -
           0.5 * params_.mu * params_.sigma_tilde * (delta_ - t) * (delta_ + t);
  }
  double pressure_prime(double y) const {
    return -params_.mu * sigma_prime(y) + params_.mu * params_.sigma_tilde * (y - rho1_);
  }
  double pressure_second(double y) const {
    return -params_.mu * (sigma(y) - params_.sigma_tilde);
  }

  bool contains(double y) const {
    const double slack = 1e-13 * std::fmax(1.0, std::fabs(rho2_star()));
    return y >= rho1_ - slack && y <= rho2_star() + slack;
  }

 private:
  ModelParams params_;
  double rho1_;
  double delta_;
  double c_;
};

inline double sigma_star(const FlatStationary& fs, double y) {
  if (!fs.contains(y)) throw DomainError("sigma_star: y outside [rho1*, rho2*]");
  return fs.sigma(y);
}

inline double p_star(const FlatStationary& fs, double y) {
  if (!fs.contains(y)) throw DomainError("p_star: y outside [rho1*, rho2*]");
  return fs.pressure(y);
}

/// Residuals of the eight conditions defining a flat stationary solution.
/// Entries 0 and 1 are the ODEs checked by centered second differences with
/// step h; the six boundary conditions are evaluated analytically.
struct FlatResiduals {
  static constexpr std::array<std::string_view, 8> kNames = {
      "sigma'' - sigma", "p'' + mu (sigma - sigma_tilde)", "sigma(rho2) - sigma_bar",
      "sigma'(rho1)",    "p(rho1) + c",                    "p(rho2)",
      "p'(rho1)",        "p'(rho2)"};

  std::array<double, 8> values{};
  double h = 0.0;

  double max_ode() const { return std::fmax(std::fabs(values[0]), std::fabs(values[1])); }
  double max_boundary() const {
    double r = 0.0;
    for (std::size_t i = 2; i < values.size(); ++i) r = std::fmax(r, std::fabs(values[i]));
    return r;
  }
};

/// Evaluates all eight flat-system residuals. ODE residuals are the maximum
/// over `samples` interior-and-endpoint points of the layer.
inline FlatResiduals flat_residuals(const FlatStationary& fs, double h = 1e-4, int samples = 33) {
  const ModelParams& p = fs.params();
  FlatResiduals r;
  r.h = h;
  double ode_sigma = 0.0;
  double ode_p = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double y = fs.rho1_star() + fs.delta() * i / (samples - 1);
    const double s2 = (fs.sigma(y + h) - 2.0 * fs.sigma(y) + fs.sigma(y - h)) / (h * h);
    const double p2 = (fs.pressure(y + h) - 2.0 * fs.pressure(y) + fs.pressure(y - h)) / (h * h);
    ode_sigma = std::fmax(ode_sigma, std::fabs(s2 - fs.sigma(y)));
    ode_p = std::fmax(ode_p, std::fabs(p2 + p.mu * (fs.sigma(y) - p.sigma_tilde)));
  }
  r.values[0] = ode_sigma;
  r.values[1] = ode_p;
  r.values[2] = fs.sigma(fs.rho2_star()) - p.sigma_bar;
  r.values[3] = fs.sigma_prime(fs.rho1_star());
  r.values[4] = fs.pressure(fs.rho1_star()) + fs.c_value();
  r.values[5] = fs.pressure(fs.rho2_star());
  r.values[6] = fs.pressure_prime(fs.rho1_star());
  r.values[7] = fs.pressure_prime(fs.rho2_star());
  return r;
}

/// Member of the one-parameter family of flat stationary solutions with lower
/// interface at rho1_star. Throws if the assembled solution fails its own
/// residual check (boundary conditions 1e-10, ODEs 1e-6 at h = 1e-4).
inline FlatStationary flat_stationary(const ModelParams& params, double rho1_star) {
  params.validate();
  if (!(rho1_star > 0.0) || !std::isfinite(rho1_star)) {
    throw DomainError("flat_stationary: rho1_star must be positive");
  }
  const double delta = solve_delta(params.ratio());
  FlatStationary fs(params, rho1_star, delta, necrosis_constant(params, delta));
  const FlatResiduals r = flat_residuals(fs);
  const double scale = std::fmax(1.0, params.mu * params.sigma_bar * (1.0 + delta * delta));
  if (r.max_boundary() > 1e-10 * scale || r.max_ode() > 1e-6 * scale) {
    throw std::runtime_error("flat_stationary: residual check failed");
  }
  return fs;
}

}  // namespace necrotic
