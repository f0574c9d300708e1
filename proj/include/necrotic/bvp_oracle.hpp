#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "necrotic/errors.hpp"

// Second-order finite-difference solver for
//   diffusion * u'' + reaction * u = rhs   on [0, 1]
// with Dirichlet or Neumann data at each end. It is the reference the closed
// mode formulas are checked against, so it deliberately shares no code with
// mode_solver.hpp.

namespace necrotic::oracle {

struct BoundaryCondition {
  enum class Kind { kDirichlet, kNeumann };
  Kind kind = Kind::kDirichlet;
  double value = 0.0;  // u or du/dy at the boundary

  static BoundaryCondition dirichlet(double v) { return {Kind::kDirichlet, v}; }
  static BoundaryCondition neumann(double v) { return {Kind::kNeumann, v}; }
  bool is_neumann() const { return kind == Kind::kNeumann; }
};

struct TwoPointBVP {
  double diffusion = 1.0;
  double reaction = 0.0;
  std::function<double(double)> rhs = [](double) { return 0.0; };
  BoundaryCondition left;
  BoundaryCondition right;

  bool pure_neumann() const { return reaction == 0.0 && left.is_neumann() && right.is_neumann(); }
};

enum class OracleStatus { kSolved, kUnsolvable };

struct OracleSolution {
  std::vector<double> grid;
  std::vector<double> values;
  // Discrete compatibility defect h*sum_trap(rhs) - diffusion*(g_R - g_L);
  // only meaningful for pure-Neumann, zero-reaction problems (0 otherwise).
  double compatibility_defect = 0.0;
  OracleStatus status = OracleStatus::kSolved;

  bool solved() const { return status == OracleStatus::kSolved; }
};

struct SolveOptions {
  // Relative tolerance on the compatibility defect of pure-Neumann problems.
  double compatibility_tol = 1e-10;
};

namespace detail {

// Thomas algorithm; lower[0] and upper[n-1] are unused.
inline std::vector<double> thomas(std::vector<double> lower, std::vector<double> diag,
                                  std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

inline double trapezoid_mean(std::span<const double> v) {
  const std::size_t n = v.size() - 1;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i < n; ++i) s += v[i];
  return s / static_cast<double>(n);
}

}  // namespace detail

/// Solves the BVP on n uniform intervals. Neumann ends use a second-order
/// ghost node. Pure-Neumann problems with zero reaction are solvable only for
/// compatible data; they are returned with zero trapezoidal mean, and flagged
/// kUnsolvable (values of the projected problem still filled in) otherwise.
inline OracleSolution solve(const TwoPointBVP& bvp, int n, const SolveOptions& opts = {}) {
  if (n < 8) throw DomainError("oracle::solve: n must be >= 8");
  if (!(bvp.diffusion > 0.0)) throw DomainError("oracle::solve: diffusion must be positive");

  const std::size_t size = static_cast<std::size_t>(n) + 1;
  const double h = 1.0 / n;
  const double dh2 = bvp.diffusion / (h * h);

  OracleSolution out;
  out.grid.resize(size);
  std::vector<double> f(size);
  for (std::size_t i = 0; i < size; ++i) {
    out.grid[i] = static_cast<double>(i) * h;
    f[i] = bvp.rhs(out.grid[i]);
  }

  std::vector<double> lower(size, dh2), diag(size, -2.0 * dh2 + bvp.reaction), upper(size, dh2);
  std::vector<double> rhs = f;

  if (bvp.left.is_neumann()) {
    // u_{-1} = u_1 - 2 h g
    upper[0] = 2.0 * dh2;
    rhs[0] += 2.0 * dh2 * h * bvp.left.value;
  } else {
    diag[0] = 1.0;
    upper[0] = 0.0;
    rhs[0] = bvp.left.value;
  }
  if (bvp.right.is_neumann()) {
    // u_{n+1} = u_{n-1} + 2 h g
    lower[n] = 2.0 * dh2;
    rhs[n] -= 2.0 * dh2 * h * bvp.right.value;
  } else {
    diag[n] = 1.0;
    lower[n] = 0.0;
    rhs[n] = bvp.right.value;
  }

  if (bvp.pure_neumann()) {
    const double gap = bvp.diffusion * (bvp.right.value - bvp.left.value);
    const double defect = detail::trapezoid_mean(f) - gap;
    double scale = bvp.diffusion * (std::fabs(bvp.right.value) + std::fabs(bvp.left.value));
    for (double v : f) scale += std::fabs(v) / n;
    out.compatibility_defect = defect;
    if (std::fabs(defect) > opts.compatibility_tol * (1.0 + scale)) {
      out.status = OracleStatus::kUnsolvable;
    }
    // Shift the data onto the solvable subspace, pin u_0 = 0, then
    // renormalize to zero mean.
    for (double& v : rhs) v -= defect;
    diag[0] = 1.0;
    upper[0] = 0.0;
    rhs[0] = 0.0;
    out.values = detail::thomas(lower, diag, upper, rhs);
    const double mean = detail::trapezoid_mean(out.values);
    for (double& v : out.values) v -= mean;
    return out;
  }

  out.values = detail::thomas(lower, diag, upper, rhs);
  return out;
}

struct ConvergenceEntry {
  int n = 0;
  double sup_error = 0.0;
  double order_estimate = std::numeric_limits<double>::quiet_NaN();  // vs previous n
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  double fitted_order = std::numeric_limits<double>::quiet_NaN();
  double fitted_constant = 0.0;  // C in sup_error ~ C n^-2
  bool incompatible = false;
  bool passed = false;
};

struct VerifyOptions {
  double order_min = 1.9;
  double order_max = 2.1;
  // Below this sup error on every grid the comparison passes outright (exact
  // agreement leaves no convergence to fit).
  double error_floor = 1e-11;
};

/// Compares `analytic` against oracle solutions on each n, fits the observed
/// order by least squares in log-log and passes when it lies in the window.
/// Pure-Neumann oracles are shifted to the analytic trapezoidal mean.
inline ConvergenceReport verify_closed_form(const std::function<double(double)>& analytic,
                                            const TwoPointBVP& bvp, std::span<const int> ns,
                                            const VerifyOptions& opts = {}) {
  if (ns.size() < 3) throw DomainError("verify_closed_form: need at least 3 grids");
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) throw DomainError("verify_closed_form: n sequence must increase");
  }
  ConvergenceReport report;
  for (int n : ns) {
    OracleSolution sol = solve(bvp, n);
    if (!sol.solved()) report.incompatible = true;
    std::vector<double> exact(sol.grid.size());
    for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = analytic(sol.grid[i]);
    if (bvp.pure_neumann()) {
      const double shift = detail::trapezoid_mean(exact) - detail::trapezoid_mean(sol.values);
      for (double& v : sol.values) v += shift;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      err = std::fmax(err, std::fabs(sol.values[i] - exact[i]));
    }
    ConvergenceEntry e{n, err};
    if (!report.entries.empty()) {
      const auto& prev = report.entries.back();
      e.order_estimate = std::log(prev.sup_error / err) / std::log(static_cast<double>(n) / prev.n);
    }
    report.entries.push_back(e);
    report.fitted_constant = std::fmax(report.fitted_constant, err * n * static_cast<double>(n));
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool all_below_floor = true;
  for (const auto& e : report.entries) {
    all_below_floor = all_below_floor && e.sup_error <= opts.error_floor;
    const double x = std::log(static_cast<double>(e.n));
    const double y = std::log(std::fmax(e.sup_error, std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(report.entries.size());
  report.fitted_order = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  report.passed = !report.incompatible &&
                  (all_below_floor || (report.fitted_order >= opts.order_min &&
                                       report.fitted_order <= opts.order_max));
  return report;
}

/// Aligned text table: n, sup error, order estimate, then the verdict.
inline std::string format_report(const ConvergenceReport& r) {
  std::string out = "       n        sup_error   order\n";
  char buf[96];
  for (const auto& e : r.entries) {
    if (std::isnan(e.order_estimate)) {
      std::snprintf(buf, sizeof buf, "%8d  %15.6e       -\n", e.n, e.sup_error);
    } else {
      std::snprintf(buf, sizeof buf, "%8d  %15.6e  %6.3f\n", e.n, e.sup_error, e.order_estimate);
    }
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "fitted order %.3f  C %.3e  %s%s\n", r.fitted_order,
                r.fitted_constant, r.passed ? "PASS" : "FAIL",
                r.incompatible ? " (incompatible data)" : "");
  out += buf;
  return out;
}

/// One JSON record {n, sup_error, order_estimate} per grid; null for the first order.
inline nlohmann::json report_to_json(const ConvergenceReport& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json rec{{"n", e.n}, {"sup_error", e.sup_error}};
    rec["order_estimate"] =
        std::isnan(e.order_estimate) ? nlohmann::json(nullptr) : nlohmann::json(e.order_estimate);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace necrotic::oracle
