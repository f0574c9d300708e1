#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "necrotic/bvp_oracle.hpp"
#include "necrotic/errors.hpp"
#include "necrotic/mode_solver.hpp"
#include "necrotic/stationary.hpp"

// Linearized interface dynamics around a flat equilibrium. Sigma and P carry
// no time derivative, so every velocity evaluation solves the two mode BVPs
// quasi-statically and reads the interface speeds off P_y' at both ends.

namespace necrotic {

/// Fourier amplitudes of r (a_k, b_k) and s (c_k, d_k) for k = 0..K.
struct LinearState {
  int K = 0;
  std::vector<std::array<double, 2>> r_coeffs;
  std::vector<std::array<double, 2>> s_coeffs;
  double time = 0.0;

  static LinearState zeros(int K) {
    LinearState s;
    s.K = K;
    s.r_coeffs.assign(static_cast<std::size_t>(K) + 1, {0.0, 0.0});
    s.s_coeffs.assign(static_cast<std::size_t>(K) + 1, {0.0, 0.0});
    return s;
  }

  void validate() const {
    if (K < 0) throw DomainError("LinearState: K must be >= 0");
    const auto size = static_cast<std::size_t>(K) + 1;
    if (r_coeffs.size() != size || s_coeffs.size() != size) {
      throw DomainError("LinearState: coefficient vectors must have K+1 entries");
    }
    if (r_coeffs[0][1] != 0.0 || s_coeffs[0][1] != 0.0) {
      throw DomainError("LinearState: k = 0 has no sine component");
    }
  }
};

struct ModeRate {
  int k = 0;
  std::array<double, 2> rate_r{};  // d/dt (a_k, b_k)
  std::array<double, 2> rate_s{};  // d/dt (c_k, d_k)
};

/// Constants shared by every velocity evaluation.
struct EvolutionModel {
  FlatStationary fs;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  int n = 512;  // oracle grid intervals per mode BVP
};

namespace detail {

// Rates (da/dt, dc/dt) of one cosine-type channel with amplitudes (a, c).
inline std::array<double, 2> channel_rates(int k, double a, double c, const EvolutionModel& model) {
  if (a == 0.0 && c == 0.0) return {0.0, 0.0};
  const FlatStationary& fs = model.fs;
  const double d = fs.delta();
  const double k2 = static_cast<double>(k) * k;
  const ModeCoefficients mode{k, a, 0.0, c, 0.0};

  oracle::TwoPointBVP nutrient;
  nutrient.diffusion = 1.0 / (d * d);
  nutrient.reaction = -(1.0 + k2);
  nutrient.rhs = forcing_f(mode, fs);
  nutrient.left = oracle::BoundaryCondition::neumann(0.0);
  nutrient.right = oracle::BoundaryCondition::dirichlet(0.0);
  const oracle::OracleSolution sigma = oracle::solve(nutrient, model.n);

  // Sigma is only known on the grid; feed it to the pressure rhs by node.
  const Profile tilde = forcing_f_tilde(mode, fs);
  const double mu = fs.params().mu;
  const int n = model.n;
  const auto& values = sigma.values;
  oracle::TwoPointBVP pressure;
  pressure.diffusion = 1.0 / (d * d);
  pressure.reaction = -k2;
  pressure.rhs = [&values, &tilde, mu, n](double y) {
    const auto l = static_cast<std::size_t>(std::lround(y * n));
    return -mu * values[l] + tilde(y);
  };
  // P = -gamma_i r'', r'' = -k^2 r on each mode
  pressure.left = oracle::BoundaryCondition::dirichlet(k2 * model.gamma1 * a);
  pressure.right = oracle::BoundaryCondition::dirichlet(k2 * model.gamma2 * c);
  const oracle::OracleSolution P = oracle::solve(pressure, model.n);

  const double h = 1.0 / n;
  const auto& u = P.values;
  const double dy0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  const double dy1 = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
  return {-dy0 / d, -dy1 / d};
}

}  // namespace detail

/// Amplitude rates of mode k: r_t = -P_y'(x, 0)/delta, s_t = -P_y'(x, 1)/delta.
inline ModeRate mode_velocity(const LinearState& state, int k, const EvolutionModel& model) {
  if (k < 0 || k > state.K) throw DomainError("mode_velocity: k outside 0..K");
  const auto& r = state.r_coeffs[static_cast<std::size_t>(k)];
  const auto& s = state.s_coeffs[static_cast<std::size_t>(k)];
  ModeRate out;
  out.k = k;
  const auto cos_rates = detail::channel_rates(k, r[0], s[0], model);
  const auto sin_rates = k == 0 ? std::array<double, 2>{0.0, 0.0}
                                : detail::channel_rates(k, r[1], s[1], model);
  out.rate_r = {cos_rates[0], sin_rates[0]};
  out.rate_s = {cos_rates[1], sin_rates[1]};
  return out;
}

inline ModeRate mode_velocity(const LinearState& state, int k, const FlatStationary& fs,
                              double gamma1, double gamma2, int n) {
  return mode_velocity(state, k, EvolutionModel{fs, gamma1, gamma2, n});
}

namespace detail {

inline LinearState velocity(const LinearState& state, const EvolutionModel& model) {
  LinearState v = LinearState::zeros(state.K);
  for (int k = 0; k <= state.K; ++k) {
    const ModeRate rate = mode_velocity(state, k, model);
    v.r_coeffs[k] = rate.rate_r;
    v.s_coeffs[k] = rate.rate_s;
  }
  return v;
}

inline LinearState axpy(const LinearState& x, double alpha, const LinearState& v) {
  LinearState out = x;
  for (std::size_t k = 0; k < out.r_coeffs.size(); ++k) {
    for (int c = 0; c < 2; ++c) {
      out.r_coeffs[k][c] += alpha * v.r_coeffs[k][c];
      out.s_coeffs[k][c] += alpha * v.s_coeffs[k][c];
    }
  }
  return out;
}

}  // namespace detail

/// One classical RK4 step of size dt; modes are advanced independently.
inline LinearState step(const LinearState& state, double dt, const EvolutionModel& model) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  state.validate();
  const LinearState k1 = detail::velocity(state, model);
  const LinearState k2 = detail::velocity(detail::axpy(state, 0.5 * dt, k1), model);
  const LinearState k3 = detail::velocity(detail::axpy(state, 0.5 * dt, k2), model);
  const LinearState k4 = detail::velocity(detail::axpy(state, dt, k3), model);
  LinearState out = state;
  for (std::size_t k = 0; k < out.r_coeffs.size(); ++k) {
    for (int c = 0; c < 2; ++c) {
      out.r_coeffs[k][c] += dt / 6.0 *
                            (k1.r_coeffs[k][c] + 2.0 * k2.r_coeffs[k][c] + 2.0 * k3.r_coeffs[k][c] +
                             k4.r_coeffs[k][c]);
      out.s_coeffs[k][c] += dt / 6.0 *
                            (k1.s_coeffs[k][c] + 2.0 * k2.s_coeffs[k][c] + 2.0 * k3.s_coeffs[k][c] +
                             k4.s_coeffs[k][c]);
    }
  }
  out.time = state.time + dt;
  // k = 0 has no sine channel; keep it exactly zero.
  out.r_coeffs[0][1] = 0.0;
  out.s_coeffs[0][1] = 0.0;
  return out;
}

/// 2x2 map (a_k, c_k) -> (da_k/dt, dc_k/dt) of one channel, probed with unit vectors.
struct RateMatrix {
  int k = 0;
  std::array<std::array<double, 2>, 2> entries{};
  std::array<std::complex<double>, 2> eigenvalues{};
};

inline RateMatrix rate_matrix(int k, const EvolutionModel& model) {
  if (k < 1) throw DomainError("rate_matrix: k must be >= 1");
  RateMatrix out;
  out.k = k;
  const auto col_a = detail::channel_rates(k, 1.0, 0.0, model);
  const auto col_c = detail::channel_rates(k, 0.0, 1.0, model);
  out.entries = {{{col_a[0], col_c[0]}, {col_a[1], col_c[1]}}};
  const double tr = out.entries[0][0] + out.entries[1][1];
  const double det = out.entries[0][0] * out.entries[1][1] - out.entries[0][1] * out.entries[1][0];
  const std::complex<double> disc = std::sqrt(std::complex<double>(0.25 * tr * tr - det));
  out.eigenvalues = {0.5 * tr + disc, 0.5 * tr - disc};
  return out;
}

/// Largest real part of the mode-k rate matrix eigenvalues.
inline double growth_rate(int k, const FlatStationary& fs, double gamma1, double gamma2, int n) {
  const RateMatrix rm = rate_matrix(k, EvolutionModel{fs, gamma1, gamma2, n});
  return std::max(rm.eigenvalues[0].real(), rm.eigenvalues[1].real());
}

}  // namespace necrotic
