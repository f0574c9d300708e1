#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "necrotic/bvp_oracle.hpp"
#include "necrotic/mode_solver.hpp"

namespace necrotic::oracle {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(OracleSolve, ZeroDataGivesZero) {
  TwoPointBVP bvp;
  bvp.reaction = -2.0;
  bvp.left = BoundaryCondition::neumann(0.0);
  bvp.right = BoundaryCondition::dirichlet(0.0);
  const OracleSolution sol = solve(bvp, 64);
  ASSERT_TRUE(sol.solved());
  for (double v : sol.values) EXPECT_EQ(v, 0.0);
}

TEST(OracleSolve, RejectsSmallGridAndBadDiffusion) {
  TwoPointBVP bvp;
  EXPECT_THROW(solve(bvp, 4), DomainError);
  bvp.diffusion = 0.0;
  EXPECT_THROW(solve(bvp, 16), DomainError);
}

TEST(OracleSolve, ManufacturedDirichletNeumannOrder) {
  // u = cos(pi y / 2): u'(0) = 0, u(1) = 0, u'' - 3 u = -(pi^2/4 + 3) u
  TwoPointBVP bvp;
  bvp.reaction = -3.0;
  bvp.rhs = [](double y) { return -(kPi * kPi / 4.0 + 3.0) * std::cos(kPi * y / 2.0); };
  bvp.left = BoundaryCondition::neumann(0.0);
  bvp.right = BoundaryCondition::dirichlet(0.0);
  const std::array<int, 4> ns{32, 64, 128, 256};
  const ConvergenceReport r =
      verify_closed_form([](double y) { return std::cos(kPi * y / 2.0); }, bvp, ns);
  EXPECT_TRUE(r.passed) << format_report(r);
  EXPECT_GE(r.fitted_order, 1.9);
  EXPECT_LE(r.fitted_order, 2.1);
}

TEST(OracleSolve, ManufacturedPureNeumannOrder) {
  // u = cos(pi y): compatible, mean zero
  TwoPointBVP bvp;
  bvp.rhs = [](double y) { return -kPi * kPi * std::cos(kPi * y); };
  bvp.left = BoundaryCondition::neumann(0.0);
  bvp.right = BoundaryCondition::neumann(0.0);
  ASSERT_TRUE(bvp.pure_neumann());
  const std::array<int, 4> ns{32, 64, 128, 256};
  const ConvergenceReport r =
      verify_closed_form([](double y) { return std::cos(kPi * y) + 5.0; }, bvp, ns);
  EXPECT_TRUE(r.passed) << format_report(r);
  EXPECT_FALSE(r.incompatible);
}

TEST(OracleSolve, NonzeroNeumannData) {
  // u = y^2 / 2 + y: u'' = 1, u'(0) = 1, u'(1) = 2, compatible
  TwoPointBVP bvp;
  bvp.rhs = [](double) { return 1.0; };
  bvp.left = BoundaryCondition::neumann(1.0);
  bvp.right = BoundaryCondition::neumann(2.0);
  const OracleSolution sol = solve(bvp, 64);
  EXPECT_TRUE(sol.solved());
  EXPECT_LE(std::fabs(sol.compatibility_defect), 1e-14);
  // quadratic: the scheme is exact up to the mean shift
  const double shift = sol.values[0];
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    const double y = sol.grid[i];
    EXPECT_NEAR(sol.values[i] - shift, 0.5 * y * y + y, 1e-12);
  }
}

TEST(OracleSolve, ReproducesClosedAk) {
  const auto fs = flat_stationary({2.0, 1.0, 1.0}, 1.0);
  const ModeCoefficients mode{2, 0.7, 0.0, -0.4, 0.0};
  TwoPointBVP bvp;
  bvp.diffusion = 1.0 / (fs.delta() * fs.delta());
  bvp.reaction = -5.0;
  bvp.rhs = forcing_f(mode, fs);
  bvp.left = BoundaryCondition::neumann(0.0);
  bvp.right = BoundaryCondition::dirichlet(0.0);
  const std::array<int, 4> ns{64, 128, 256, 512};
  const ConvergenceReport r = verify_closed_form(closed_Ak(mode, fs), bvp, ns);
  EXPECT_TRUE(r.passed) << format_report(r);
  EXPECT_LE(r.entries.back().sup_error, 1e-5);
}

TEST(OracleSolve, DiscreteMaximumPrinciple) {
  // u'' - 4 u = f <= 0 with zero Dirichlet data => u >= 0
  TwoPointBVP bvp;
  bvp.reaction = -4.0;
  bvp.rhs = [](double y) { return -std::exp(y) * (1.0 + std::sin(7.0 * y) * std::sin(7.0 * y)); };
  bvp.left = BoundaryCondition::dirichlet(0.0);
  bvp.right = BoundaryCondition::dirichlet(0.0);
  const OracleSolution sol = solve(bvp, 200);
  for (double v : sol.values) EXPECT_GE(v, 0.0);
}

TEST(OracleSolve, NeumannDefectIsLinearInMismatch) {
  // Zeroth pressure mode with c_0 != a_0: forcing mu A_0 + f~_0 is not mean-free.
  const auto fs = flat_stationary({2.0, 1.0, 1.0}, 1.0);
  std::vector<double> mismatch, defect;
  for (double gap : {-0.4, -0.1, 0.05, 0.2, 0.5, 1.0}) {
    const ModeCoefficients mode{0, 0.3, 0.0, 0.3 + gap, 0.0};
    const Profile A0 = closed_A0(mode, fs);
    const Profile ft = forcing_f_tilde(mode, fs);
    const double mu = fs.params().mu;
    TwoPointBVP bvp;
    bvp.diffusion = 1.0 / (fs.delta() * fs.delta());
    bvp.rhs = [=](double y) { return -mu * A0(y) + ft(y); };
    bvp.left = BoundaryCondition::neumann(0.0);
    bvp.right = BoundaryCondition::neumann(0.0);
    const OracleSolution sol = solve(bvp, 1024);
    EXPECT_FALSE(sol.solved());
    EXPECT_GT(std::fabs(sol.compatibility_defect), 1e-3 * std::fabs(gap));
    mismatch.push_back(gap);
    defect.push_back(sol.compatibility_defect);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < mismatch.size(); ++i) {
    mx += mismatch[i];
    my += defect[i];
  }
  mx /= mismatch.size();
  my /= defect.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < mismatch.size(); ++i) {
    sxy += (mismatch[i] - mx) * (defect[i] - my);
    sxx += (mismatch[i] - mx) * (mismatch[i] - mx);
    syy += (defect[i] - my) * (defect[i] - my);
  }
  EXPECT_GT(std::fabs(sxy / std::sqrt(sxx * syy)), 0.999);
  EXPECT_NEAR(std::fabs(defect.back()), 0.43531300719685, 1e-5);
}

TEST(OracleSolve, MatchedZerothModeIsTrivial) {
  const auto fs = flat_stationary({2.0, 1.0, 1.0}, 1.0);
  const ModeCoefficients mode{0, 0.6, 0.0, 0.6, 0.0};
  const Profile A0 = closed_A0(mode, fs);
  const Profile ft = forcing_f_tilde(mode, fs);
  TwoPointBVP bvp;
  bvp.diffusion = 1.0 / (fs.delta() * fs.delta());
  bvp.rhs = [=](double y) { return -A0(y) + ft(y); };
  bvp.left = BoundaryCondition::neumann(0.0);
  bvp.right = BoundaryCondition::neumann(0.0);
  const OracleSolution sol = solve(bvp, 1024);
  EXPECT_TRUE(sol.solved());
  EXPECT_LT(std::fabs(sol.compatibility_defect), 1e-10);
  for (double v : sol.values) EXPECT_LT(std::fabs(v), 1e-10);
}

TEST(VerifyClosedForm, WrongAnalyticFails) {
  TwoPointBVP bvp;
  bvp.reaction = -3.0;
  bvp.rhs = [](double y) { return -(kPi * kPi / 4.0 + 3.0) * std::cos(kPi * y / 2.0); };
  bvp.left = BoundaryCondition::neumann(0.0);
  bvp.right = BoundaryCondition::dirichlet(0.0);
  const std::array<int, 4> ns{32, 64, 128, 256};
  const ConvergenceReport r =
      verify_closed_form([](double y) { return std::cos(kPi * y / 2.0) + 1e-3; }, bvp, ns);
  EXPECT_FALSE(r.passed);
  EXPECT_LT(std::fabs(r.fitted_order), 0.5);
}

TEST(VerifyClosedForm, RejectsBadSequences) {
  TwoPointBVP bvp;
  const std::array<int, 2> few{16, 32};
  const std::array<int, 3> unordered{16, 64, 32};
  EXPECT_THROW(verify_closed_form([](double) { return 0.0; }, bvp, few), DomainError);
  EXPECT_THROW(verify_closed_form([](double) { return 0.0; }, bvp, unordered), DomainError);
}

TEST(VerifyClosedForm, ExactAgreementPassesThroughFloor) {
  TwoPointBVP bvp;
  bvp.rhs = [](double) { return 2.0; };
  bvp.left = BoundaryCondition::dirichlet(0.0);
  bvp.right = BoundaryCondition::dirichlet(1.0);
  const std::array<int, 3> ns{16, 32, 64};
  const ConvergenceReport r = verify_closed_form([](double y) { return y * y; }, bvp, ns);
  EXPECT_TRUE(r.passed);
}

TEST(ConvergenceReport, TextAndJson) {
  ConvergenceReport r;
  r.entries = {{32, 1e-3}, {64, 2.5e-4, 2.0}};
  r.fitted_order = 2.0;
  r.passed = true;
  const std::string text = format_report(r);
  EXPECT_NE(text.find("PASS"), std::string::npos);
  EXPECT_NE(text.find("2.000"), std::string::npos);
  const nlohmann::json j = report_to_json(r);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_TRUE(j[0]["order_estimate"].is_null());
  EXPECT_EQ(j[1]["n"], 64);
  EXPECT_DOUBLE_EQ(j[1]["order_estimate"].get<double>(), 2.0);
}

}  // namespace
}  // namespace necrotic::oracle
