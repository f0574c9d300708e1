#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "necrotic/bvp_oracle.hpp"
#include "necrotic/evolution.hpp"
#include "necrotic/mode_solver.hpp"
#include "necrotic/stationary.hpp"
#include "necrotic/strip_elliptic.hpp"

// Self-check suites behind `necrotic_cli verify`. Every check is a pure
// function of the parameters, so the report is reproducible byte for byte.

namespace necrotic::verify {

struct Check {
  std::string suite;
  std::string quantity;
  double value = 0.0;
  std::string relation;  // "<=" or ">="
  double bound = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<Check> checks;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

namespace detail {

inline void at_most(Report& r, std::string suite, std::string quantity, double value, double bound) {
  r.checks.push_back({std::move(suite), std::move(quantity), value, "<=", bound,
                      std::isfinite(value) && value <= bound});
}

inline void at_least(Report& r, std::string suite, std::string quantity, double value, double bound) {
  r.checks.push_back({std::move(suite), std::move(quantity), value, ">=", bound,
                      std::isfinite(value) && value >= bound});
}

inline double order_of(const std::vector<int>& ns, const std::vector<double>& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(ns.size());
  return -(k * sxy - sx * sy) / (k * sxx - sx * sx);
}

inline void delta_suite(Report& r, const ModelParams& p) {
  const double d = solve_delta(p.ratio());
  at_most(r, "delta", "condition_residual", std::fabs(std::tanh(d) / d - p.ratio()), 1e-12);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double ratio = std::exp(std::log(0.01) + (std::log(0.99) - std::log(0.01)) * i / 99.0);
    const double x = solve_delta(ratio);
    worst = std::max(worst, std::fabs(std::tanh(x) / x - ratio));
  }
  at_most(r, "delta", "sweep_max_residual", worst, 1e-12);
}

inline void flat_suite(Report& r, const FlatStationary& fs) {
  const FlatResiduals res = flat_residuals(fs);
  at_most(r, "flat", "boundary_residual", res.max_boundary(), 1e-10);
  at_most(r, "flat", "ode_residual", res.max_ode(), 1e-6);
}

inline void mode_suite(Report& r, const FlatStationary& fs) {
  const double d = fs.delta();
  const double mu = fs.params().mu;
  const std::array<int, 4> ns{128, 256, 512, 1024};
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  double a_lo = INFINITY, a_hi = -INFINITY, m_lo = INFINITY, m_hi = -INFINITY, slope = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const ModeCoefficients mode{k, amp(rng), 0.0, amp(rng), 0.0};
    const Profile A = closed_Ak(mode, fs);
    const Profile M = closed_Mk(mode, fs);
    const Profile ft = forcing_f_tilde(mode, fs);

    oracle::TwoPointBVP nutrient;
    nutrient.diffusion = 1.0 / (d * d);
    nutrient.reaction = -(1.0 + static_cast<double>(k) * k);
    nutrient.rhs = forcing_f(mode, fs);
    nutrient.left = oracle::BoundaryCondition::neumann(0.0);
    nutrient.right = oracle::BoundaryCondition::dirichlet(0.0);
    const auto ra = oracle::verify_closed_form(A, nutrient, ns);
    a_lo = std::min(a_lo, ra.fitted_order);
    a_hi = std::max(a_hi, ra.fitted_order);

    oracle::TwoPointBVP pressure;
    pressure.diffusion = 1.0 / (d * d);
    pressure.reaction = -static_cast<double>(k) * k;
    pressure.rhs = [=](double y) { return -mu * A(y) + ft(y); };
    pressure.left = oracle::BoundaryCondition::neumann(0.0);
    pressure.right = oracle::BoundaryCondition::neumann(0.0);
    const auto rm = oracle::verify_closed_form(M, pressure, ns);
    m_lo = std::min(m_lo, rm.fitted_order);
    m_hi = std::max(m_hi, rm.fitted_order);

    const double h = 1e-5;
    slope = std::max(slope, std::fabs((-3.0 * M(0.0) + 4.0 * M(h) - M(2.0 * h)) / (2.0 * h)));
    slope = std::max(slope, std::fabs((3.0 * M(1.0) - 4.0 * M(1.0 - h) + M(1.0 - 2.0 * h)) / (2.0 * h)));
  }
  at_least(r, "nutrient_modes", "min_fitted_order", a_lo, 1.9);
  at_most(r, "nutrient_modes", "max_fitted_order", a_hi, 2.1);
  at_least(r, "pressure_modes", "min_fitted_order", m_lo, 1.9);
  at_most(r, "pressure_modes", "max_fitted_order", m_hi, 2.1);
  at_most(r, "pressure_modes", "end_slope", slope, 1e-6);
}

inline void zeroth_mode_suite(Report& r, const FlatStationary& fs) {
  const double d = fs.delta();
  const double mu = fs.params().mu;
  auto run = [&](double a, double c) {
    const ModeCoefficients mode{0, a, 0.0, c, 0.0};
    const Profile A0 = closed_A0(mode, fs);
    const Profile ft = forcing_f_tilde(mode, fs);
    oracle::TwoPointBVP bvp;
    bvp.diffusion = 1.0 / (d * d);
    bvp.rhs = [=](double y) { return -mu * A0(y) + ft(y); };
    bvp.left = oracle::BoundaryCondition::neumann(0.0);
    bvp.right = oracle::BoundaryCondition::neumann(0.0);
    return oracle::solve(bvp, 1024);
  };
  const auto matched = run(0.7, 0.7);
  double norm = 0.0;
  for (double v : matched.values) norm = std::max(norm, std::fabs(v));
  at_most(r, "zeroth_mode", "matched_defect", std::fabs(matched.compatibility_defect), 1e-10);
  at_most(r, "zeroth_mode", "matched_norm", norm, 1e-10);
  const auto mismatched = run(0.7, 0.2);
  at_least(r, "zeroth_mode", "mismatch_defect_per_gap", std::fabs(mismatched.compatibility_defect) / 0.5,
           1e-3);
}

inline void gamma_suite(Report& r, const FlatStationary& fs) {
  double worst = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double a = 0.8;
    const double c = -0.5;
    const Profile M = closed_Mk({k, a, 0.0, c, 0.0}, fs);
    const double k2 = static_cast<double>(k) * k;
    worst = std::max(worst, std::fabs(gamma1(k, fs, c / a) * k2 * a - M(0.0)) / std::fabs(M(0.0)));
    worst = std::max(worst, std::fabs(gamma2(k, fs, a / c) * k2 * c - M(1.0)) / std::fabs(M(1.0)));
  }
  at_most(r, "gamma", "end_value_relative_error", worst, 1e-10);

  const auto rows = gamma_sweep(fs, 200);
  at_most(r, "gamma", "positivity_threshold_k0", positivity_threshold(rows), 5);
  int violations = 0;
  for (std::size_t i = 10; i < rows.size(); ++i) {
    if (!(rows[i].gamma1 < rows[i - 1].gamma1) || !(rows[i].gamma2 < rows[i - 1].gamma2)) ++violations;
  }
  at_most(r, "gamma", "monotonicity_violations", violations, 0);
  at_most(r, "gamma", "gamma_max_at_200", std::max(rows.back().gamma1, rows.back().gamma2), 1e-3);
}

inline void strip_suite(Report& r, const FlatStationary& fs) {
  const int m = 8;
  const auto rho1 = BoundaryCurve::constant(m, fs.rho1_star());
  const auto rho2 = BoundaryCurve::constant(m, fs.rho2_star());
  const std::vector<int> ns{32, 64, 128, 256};
  std::vector<double> es, ep;
  for (int n : ns) {
    const GridFunction2D s = solve_nutrient(rho1, rho2, fs.params().sigma_bar, n);
    const PressureSolution p = solve_pressure_neumann(rho1, rho2, fs.params(), n);
    double e1 = 0.0, e2 = 0.0;
    for (int j = 0; j < m; ++j) {
      for (int l = 0; l <= n; ++l) {
        const double y = fs.rho1_star() + fs.delta() * l / n;
        e1 = std::max(e1, std::fabs(s(j, l) - fs.sigma(y)));
        e2 = std::max(e2, std::fabs(p.p(j, l) - fs.pressure(y) - fs.c_value()));
      }
    }
    es.push_back(e1);
    ep.push_back(e2);
  }
  const double os = order_of(ns, es);
  const double op = order_of(ns, ep);
  at_least(r, "strip_nutrient", "fitted_order_min", os, 1.9);
  at_most(r, "strip_nutrient", "fitted_order_max", os, 2.1);
  at_least(r, "strip_pressure", "fitted_order_min", op, 1.9);
  at_most(r, "strip_pressure", "fitted_order_max", op, 2.1);

  const double d = fs.delta();
  const double th = std::tanh(d);
  const double expected = fs.params().sigma_bar * (1.0 - th / d - th * th);
  at_most(r, "phi", "flat_abs", std::fabs(phi(rho1, rho2, fs.params(), 256)), 5e-6);
  at_most(r, "phi", "derivative_error",
          std::fabs(phi_prime_up(rho1, rho2, fs.params(), 256, 1e-4) - expected), 1e-3);
}

inline void evolution_suite(Report& r, const FlatStationary& fs) {
  const int k = 2;
  const EvolutionModel model{fs, gamma1(k, fs, 1.0), gamma2(k, fs, 1.0), 4096};
  const RateMatrix rm = rate_matrix(k, model);
  at_most(r, "evolution", "neutral_eigenvalue",
          std::min(std::abs(rm.eigenvalues[0]), std::abs(rm.eigenvalues[1])), 1e-5);
}

}  // namespace detail

/// Runs every suite at the given parameters.
inline Report run_all(const ModelParams& params, double rho1_star) {
  const FlatStationary fs = flat_stationary(params, rho1_star);
  Report r;
  detail::delta_suite(r, params);
  detail::flat_suite(r, fs);
  detail::mode_suite(r, fs);
  detail::zeroth_mode_suite(r, fs);
  detail::gamma_suite(r, fs);
  detail::strip_suite(r, fs);
  detail::evolution_suite(r, fs);
  return r;
}

}  // namespace necrotic::verify
