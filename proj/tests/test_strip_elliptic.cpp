#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "necrotic/strip_elliptic.hpp"

namespace necrotic {
namespace {

const ModelParams kParams{2.0, 1.0, 1.0};

struct FlatPair {
  FlatStationary fs = flat_stationary(kParams, 1.0);
  BoundaryCurve rho1;
  BoundaryCurve rho2;
  explicit FlatPair(int m)
      : rho1(BoundaryCurve::constant(m, 1.0)), rho2(BoundaryCurve::constant(m, 1.0 + fs.delta())) {}
};

double fitted_order(const std::vector<int>& ns, const std::vector<double>& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(ns[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(ns.size());
  return -(k * sxy - sx * sy) / (k * sxx - sx * sx);
}

TEST(GridFunction2D, IndexingAndRows) {
  GridFunction2D g(8, 4, 1.5);
  g(3, 2) = -1.0;
  EXPECT_EQ(g(3, 2), -1.0);
  EXPECT_EQ(g.min(), -1.0);
  EXPECT_EQ(g.max(), 1.5);
  EXPECT_EQ(g.row(2)[3], -1.0);
  EXPECT_EQ(g.row(2).size(), 8u);
  EXPECT_DOUBLE_EQ(g.y(4), 1.0);
  EXPECT_DOUBLE_EQ(g.x(4), std::numbers::pi);
}

TEST(BuildOperator, FlatCoefficients) {
  const FlatPair fp(16);
  const StripOperator op = build_operator(fp.rho1, fp.rho2, 8);
  const double d = fp.fs.delta();
  for (int j = 0; j < 16; ++j) {
    for (int l = 0; l <= 8; ++l) {
      EXPECT_EQ(op.a11(j, l), 1.0);
      EXPECT_NEAR(op.a12(j, l), 0.0, 1e-15);
      EXPECT_NEAR(op.a22(j, l), 1.0 / (d * d), 1e-14);
      EXPECT_NEAR(op.b(j, l), 0.0, 1e-14);
    }
    EXPECT_NEAR(op.b1_x[j], 0.0, 1e-15);
    EXPECT_NEAR(op.b1_y[j], -1.0 / d, 1e-14);
  }
}

TEST(BuildOperator, RejectsDegenerateStrip) {
  const auto low = BoundaryCurve::constant(8, 1.0);
  auto crossing = BoundaryCurve::from_function(8, [](double x) { return 1.5 + std::cos(x); });
  EXPECT_THROW(build_operator(crossing, BoundaryCurve::constant(8, 2.0), 4), DomainError);
  EXPECT_THROW(build_operator(low, low, 4), DomainError);
  EXPECT_THROW(build_operator(low, BoundaryCurve::constant(16, 2.0), 4), DomainError);
}

TEST(Ellipticity, FlatStripWithDeltaTwo) {
  const auto op = build_operator(BoundaryCurve::constant(8, 1.0), BoundaryCurve::constant(8, 3.0), 8);
  const EllipticityBounds e = ellipticity_bounds(op);
  EXPECT_NEAR(e.lambda, 0.2, 1e-14);
  EXPECT_NEAR(e.Lambda, 1.0, 1e-14);
  EXPECT_NEAR(e.min_eigenvalue, 0.25, 1e-14);
  EXPECT_NEAR(e.min_determinant, 0.25, 1e-14);
}

TEST(EllipticityProperty, RandomCurves) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double a1 = 0.3 * u(rng), b1 = 0.3 * u(rng), a2 = 0.5 * u(rng), k2 = 1 + trial % 4;
    const double gap = 0.2 + std::fabs(u(rng)) * 2.0;
    const auto rho1 = BoundaryCurve::from_function(
        32, [&](double x) { return 1.0 + a1 * std::cos(x) + b1 * std::sin(3.0 * x); });
    const auto rho2 = BoundaryCurve::from_function(
        32, [&](double x) { return 1.7 + gap + a2 * std::cos(k2 * x); });
    const EllipticityBounds e = ellipticity_bounds(build_operator(rho1, rho2, 16));
    EXPECT_GT(e.min_determinant, 0.0);
    EXPECT_GT(e.lambda, 0.0);
    EXPECT_LE(e.lambda, e.min_eigenvalue * (1.0 + 1e-12));
    EXPECT_LE(e.lambda, e.Lambda);
  }
}

TEST(SolveNutrient, FlatProfileSecondOrder) {
  const FlatPair fp(8);
  const std::vector<int> ns{32, 64, 128, 256};
  std::vector<double> errors;
  for (int n : ns) {
    const GridFunction2D s = solve_nutrient(fp.rho1, fp.rho2, 2.0, n);
    double err = 0.0;
    for (int j = 0; j < 8; ++j) {
      for (int l = 0; l <= n; ++l) {
        const double y = fp.fs.rho1_star() + fp.fs.delta() * l / n;
        err = std::max(err, std::fabs(s(j, l) - fp.fs.sigma(y)));
      }
    }
    errors.push_back(err);
  }
  const double p = fitted_order(ns, errors);
  EXPECT_GE(p, 1.9);
  EXPECT_LE(p, 2.1);
}

TEST(SolveNutrient, MaximumPrincipleAndLinearity) {
  const auto rho1 = BoundaryCurve::from_function(32, [](double x) { return 1.0 + 0.2 * std::cos(x); });
  const auto rho2 =
      BoundaryCurve::from_function(32, [](double x) { return 3.0 + 0.3 * std::sin(2.0 * x); });
  const GridFunction2D s = solve_nutrient(rho1, rho2, 2.0, 32);
  EXPECT_GT(s.min(), 0.0);
  EXPECT_LE(s.max(), 2.0 + 1e-12);
  const GridFunction2D t = solve_nutrient(rho1, rho2, 3.0, 32);
  for (std::size_t i = 0; i < s.values().size(); ++i) {
    EXPECT_NEAR(t.values()[i], 1.5 * s.values()[i], 1e-12);
  }
  EXPECT_THROW(solve_nutrient(rho1, rho2, 2.0, 8), DomainError);
}

TEST(Phi, NearZeroAtFlatEquilibrium) {
  const FlatPair fp(16);
  EXPECT_LE(std::fabs(phi(fp.rho1, fp.rho2, kParams, 256)), 5e-6);
}

TEST(Phi, NegativeWhenOuterInterfaceRaised) {
  const FlatPair fp(16);
  EXPECT_LT(phi(fp.rho1, fp.rho2.raised(0.05), kParams, 64), 0.0);
  EXPECT_GT(phi(fp.rho1, fp.rho2.raised(-0.05), kParams, 64), 0.0);
}

TEST(Phi, IndependentOfMu) {
  const auto rho1 = BoundaryCurve::from_function(16, [](double x) { return 1.0 + 0.1 * std::cos(x); });
  const auto rho2 = BoundaryCurve::constant(16, 3.0);
  EXPECT_EQ(phi(rho1, rho2, {2.0, 1.0, 1.0}, 32), phi(rho1, rho2, {2.0, 1.0, 7.0}, 32));
}

TEST(Phi, DerivativeMatchesClosedForm) {
  const FlatPair fp(16);
  const double d = fp.fs.delta();
  const double th = std::tanh(d);
  const double expected = 2.0 * (1.0 - th / d - th * th);
  EXPECT_NEAR(expected, -0.8336279122483257, 1e-12);
  EXPECT_NEAR(phi_prime_up(fp.rho1, fp.rho2, kParams, 256, 1e-4), expected, 1e-3);
  EXPECT_THROW(phi_prime_up(fp.rho1, fp.rho2, kParams, 32, 0.5), DomainError);
}

TEST(SolvePressure, FlatProfileSecondOrderAndPinned) {
  const FlatPair fp(8);
  const std::vector<int> ns{32, 64, 128, 256};
  std::vector<double> errors;
  for (int n : ns) {
    const PressureSolution ps = solve_pressure_neumann(fp.rho1, fp.rho2, kParams, n);
    EXPECT_EQ(ps.p(0, 0), 0.0);
    double err = 0.0;
    for (int j = 0; j < 8; ++j) {
      for (int l = 0; l <= n; ++l) {
        const double y = fp.fs.rho1_star() + fp.fs.delta() * l / n;
        err = std::max(err, std::fabs(ps.p(j, l) - (fp.fs.pressure(y) + fp.fs.c_value())));
      }
    }
    errors.push_back(err);
  }
  const double p = fitted_order(ns, errors);
  EXPECT_GE(p, 1.9);
  EXPECT_LE(p, 2.1);
}

TEST(SolvePressure, IncompatibleShapeIsUnsolvable) {
  const FlatPair fp(16);
  try {
    solve_pressure_neumann(fp.rho1, fp.rho2.raised(0.1), kParams, 32);
    FAIL() << "expected UnsolvableError";
  } catch (const UnsolvableError& e) {
    EXPECT_LT(e.defect(), 0.0);
  }
  PressureOptions loose;
  loose.compatibility_threshold = 1.0;
  const PressureSolution ps = solve_pressure_neumann(fp.rho1, fp.rho2.raised(0.1), kParams, 32, loose);
  EXPECT_NE(ps.projection, 0.0);
}

TEST(SolvePressure, WavyPairPinnedAtOrigin) {
  const auto rho1 = BoundaryCurve::from_function(32, [](double x) { return 1.0 + 0.01 * std::cos(x); });
  const auto rho2 = BoundaryCurve::from_function(
      32, [](double x) { return 1.0 + 1.915008048154537 + 0.01 * std::cos(2.0 * x); });
  const PressureSolution ps = solve_pressure_neumann(rho1, rho2, kParams, 32);
  EXPECT_EQ(ps.p(0, 0), 0.0);
  EXPECT_TRUE(std::isfinite(ps.p.max()));
}

TEST(BifurcationResidual, FlatPairVanishes) {
  const FlatPair fp(8);
  // res1 carries the O(h^2) error of the discrete pressure drop
  const PressureTraces tr = pressure_traces(fp.rho1, fp.rho2, kParams, 1024);
  const double c0 = balancing_c0(tr, fp.rho2, 0.3);
  EXPECT_NEAR(c0, -fp.fs.c_value(), 1e-6);
  const BifurcationResidual r = residual_from_traces(tr, fp.rho1, fp.rho2, 0.1, 0.3, c0, fp.fs.c_value());
  for (double v : r.res2) EXPECT_LE(std::fabs(v), 1e-10);
  for (double v : r.res1) EXPECT_LE(std::fabs(v), 1e-6);
}

TEST(BifurcationResidual, ConstantAbsorbedByC0) {
  const auto rho1 = BoundaryCurve::from_function(16, [](double x) { return 1.0 + 0.02 * std::cos(x); });
  const auto rho2 = BoundaryCurve::constant(16, 1.0 + 1.915008048154537);
  const PressureTraces tr = pressure_traces(rho1, rho2, kParams, 32);
  PressureTraces shifted = tr;
  for (double& v : shifted.lower) v += 0.75;
  for (double& v : shifted.upper) v += 0.75;
  const auto a = residual_from_traces(tr, rho1, rho2, 0.2, 0.1, -0.3, 0.41);
  const auto b = residual_from_traces(shifted, rho1, rho2, 0.2, 0.1, -0.3 - 0.75, 0.41);
  for (std::size_t j = 0; j < a.res1.size(); ++j) {
    EXPECT_NEAR(a.res1[j], b.res1[j], 1e-14);
    EXPECT_NEAR(a.res2[j], b.res2[j], 1e-14);
  }
}

TEST(BifurcationResidual, MatchedGamma2CancelsFirstOrder) {
  const auto fs = flat_stationary(kParams, 1.0);
  const int m = 32;
  const int n = 128;
  const int k = 2;
  const double eps = 1e-3;
  const auto rho1 = BoundaryCurve::constant(m, fs.rho1_star());
  const auto rho2 = BoundaryCurve::from_function(
      m, [&](double x) { return fs.rho2_star() + eps * std::cos(k * x); });
  const double g2 = gamma2(k, fs, 0.0);
  const PressureTraces tr = pressure_traces(rho1, rho2, kParams, n);
  auto max_res2 = [&](double gamma) {
    const double c0 = balancing_c0(tr, rho2, gamma);
    const auto r = residual_from_traces(tr, rho1, rho2, 0.0, gamma, c0, fs.c_value());
    double out = 0.0;
    for (double v : r.res2) out = std::max(out, std::fabs(v));
    return out;
  };
  EXPECT_LT(max_res2(g2) / max_res2(2.0 * g2), 0.2);
}

TEST(GateauxGap, ZeroDirection) {
  const auto fs = flat_stationary(kParams, 1.0);
  const GateauxGap g = linearization_gateaux_gap(fs, {1, 0.0, 0.0, 0.0, 0.0}, 1e-4, 16);
  EXPECT_EQ(g.gap, 0.0);
  EXPECT_EQ(g.derivative, 0.0);
  EXPECT_THROW(linearization_gateaux_gap(fs, {1, 1.0, 0.0, 1.0, 0.0}, 1e-2, 16), DomainError);
}

TEST(GateauxGap, FirstOrderInEpsAndLinear) {
  const auto fs = flat_stationary(kParams, 1.0);
  const ModeCoefficients mode{1, 0.5, 0.0, 1.0, 0.0};
  const GateauxGap g = linearization_gateaux_gap(fs, mode, 1e-4, 16);
  const GateauxGap half = linearization_gateaux_gap(fs, mode, 5e-5, 16);
  EXPECT_LT(g.gap, 1e-2 * g.derivative);
  EXPECT_NEAR(g.gap / half.gap, 2.0, 0.1);
  const GateauxGap twice = linearization_gateaux_gap(fs, {1, 1.0, 0.0, 2.0, 0.0}, 5e-5, 16);
  EXPECT_NEAR(twice.derivative / g.derivative, 2.0, 1e-3);
}

}  // namespace
}  // namespace necrotic
