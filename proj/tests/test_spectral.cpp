#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "necrotic/spectral.hpp"

namespace necrotic {
namespace {

TEST(SpectralDerivative, TrigonometricPolynomialsExact) {
  const int m = 32;
  std::vector<double> f(m);
  for (int j = 0; j < m; ++j) {
    const double x = BoundaryCurve::node(j, m);
    f[j] = std::sin(3.0 * x) + 0.5 * std::cos(5.0 * x);
  }
  const auto d1 = spectral_derivative(f, 1);
  const auto d2 = spectral_derivative(f, 2);
  for (int j = 0; j < m; ++j) {
    const double x = BoundaryCurve::node(j, m);
    EXPECT_NEAR(d1[j], 3.0 * std::cos(3.0 * x) - 2.5 * std::sin(5.0 * x), 1e-12);
    EXPECT_NEAR(d2[j], -9.0 * std::sin(3.0 * x) - 12.5 * std::cos(5.0 * x), 1e-11);
  }
}

TEST(SpectralDerivative, NyquistDroppedForOddOrder) {
  const int m = 16;
  std::vector<double> f(m);
  for (int j = 0; j < m; ++j) f[j] = (j % 2 == 0) ? 1.0 : -1.0;  // cos(8x)
  for (double v : spectral_derivative(f, 1)) EXPECT_NEAR(v, 0.0, 1e-13);
  const auto d2 = spectral_derivative(f, 2);
  for (int j = 0; j < m; ++j) EXPECT_NEAR(d2[j], -64.0 * f[j], 1e-11);
}

TEST(BoundaryCurve, RejectsInvalidSamples) {
  EXPECT_THROW(BoundaryCurve(std::vector<double>(6, 1.0)), DomainError);
  EXPECT_THROW(BoundaryCurve(std::vector<double>(9, 1.0)), DomainError);
  std::vector<double> s(8, 1.0);
  s[3] = 0.0;
  EXPECT_THROW(BoundaryCurve{s}, DomainError);
  s[3] = std::nan("");
  EXPECT_THROW(BoundaryCurve{s}, DomainError);
}

TEST(BoundaryCurve, RaisedAndPerturbed) {
  const auto c = BoundaryCurve::constant(8, 2.0);
  EXPECT_EQ(c.raised(0.5)[3], 2.5);
  std::vector<double> dir(8, 1.0);
  EXPECT_EQ(c.perturbed(dir, 0.25)[7], 2.25);
  EXPECT_THROW(c.perturbed(std::vector<double>(4, 1.0), 0.1), DomainError);
}

TEST(Curvature, ZeroOnConstants) {
  for (double v : curvature(BoundaryCurve::constant(64, 3.7))) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Curvature, SmallCosineBump) {
  const auto rho = BoundaryCurve::from_function(64, [](double x) { return 2.0 + 0.1 * std::cos(x); });
  const auto kappa = curvature(rho);
  // At x = 0: rho' = 0, rho'' = -0.1
  EXPECT_NEAR(kappa[0], 0.1, 1e-12);
  EXPECT_NEAR(kappa[32], -0.1, 1e-12);
  // Local max has positive curvature, local min negative.
  EXPECT_GT(kappa[0], 0.0);
  EXPECT_LT(kappa[32], 0.0);
}

TEST(Curvature, MatchesAnalyticForLargeSlope) {
  const int m = 128;
  const auto rho = BoundaryCurve::from_function(m, [](double x) { return 3.0 + std::sin(2.0 * x); });
  const auto kappa = curvature(rho);
  for (int j = 0; j < m; ++j) {
    const double x = BoundaryCurve::node(j, m);
    const double d1 = 2.0 * std::cos(2.0 * x);
    const double d2 = -4.0 * std::sin(2.0 * x);
    EXPECT_NEAR(kappa[j], -d2 / std::pow(1.0 + d1 * d1, 1.5), 1e-11);
  }
}

TEST(Curvature, EquivariantUnderGridRotation) {
  const int m = 48;
  const auto f = [](double x) { return 2.0 + 0.3 * std::cos(x) + 0.1 * std::sin(4.0 * x); };
  const auto kappa = curvature(BoundaryCurve::from_function(m, f));
  for (int shift : {1, 5, 17}) {
    std::vector<double> rotated(m);
    for (int j = 0; j < m; ++j) rotated[j] = f(BoundaryCurve::node((j + shift) % m, m));
    const auto kr = curvature(BoundaryCurve(rotated));
    for (int j = 0; j < m; ++j) EXPECT_NEAR(kr[j], kappa[(j + shift) % m], 1e-12);
  }
}

}  // namespace
}  // namespace necrotic
