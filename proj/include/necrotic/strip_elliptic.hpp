#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "necrotic/errors.hpp"
#include "necrotic/mode_solver.hpp"
#include "necrotic/spectral.hpp"
#include "necrotic/stationary.hpp"

// Objects on the reference strip S^1 x [0, 1]: the pulled-back Laplacian
// A(rho1, rho2) with its conormal boundary operators, the nutrient and
// pressure solution operators, the solvability functional Phi and the
// residual map whose zeros are the stationary states.

namespace necrotic {

/// Scalar field on the tensor grid (x_j, y_l) = (2 pi j / m, l / n),
/// j = 0..m-1 (periodic), l = 0..n.
class GridFunction2D {
 public:
  GridFunction2D() = default;
  GridFunction2D(int m, int n, double fill = 0.0)
      : m_(m), n_(n), values_(static_cast<std::size_t>(m) * (n + 1), fill) {}

  int m() const { return m_; }
  int n() const { return n_; }
  double x(int j) const { return 2.0 * std::numbers::pi * j / m_; }
  double y(int l) const { return static_cast<double>(l) / n_; }

  double& operator()(int j, int l) { return values_[index(j, l)]; }
  double operator()(int j, int l) const { return values_[index(j, l)]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Row l (fixed y), as a periodic vector in x.
  std::vector<double> row(int l) const {
    std::vector<double> r(static_cast<std::size_t>(m_));
    for (int j = 0; j < m_; ++j) r[j] = (*this)(j, l);
    return r;
  }

  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }

 private:
  std::size_t index(int j, int l) const {
    const int jj = ((j % m_) + m_) % m_;
    return static_cast<std::size_t>(jj) * (n_ + 1) + l;
  }

  int m_ = 0;
  int n_ = 0;
  std::vector<double> values_;
};

/// Coefficients of A = a11 d_xx + 2 a12 d_xy + a22 d_yy + b d_y and of the
/// boundary operators B_i u = bi_x u_x + bi_y u_y (B1 at y' = 0, B2 at y' = 1).
struct StripOperator {
  GridFunction2D a11, a12, a22, b;
  std::vector<double> b1_x, b1_y, b2_x, b2_y;

  int m() const { return a11.m(); }
  int n() const { return a11.n(); }
};

inline StripOperator build_operator(const BoundaryCurve& rho1, const BoundaryCurve& rho2, int n) {
  const int m = rho1.size();
  if (rho2.size() != m) throw DomainError("build_operator: curves sampled on different grids");
  if (n < 2) throw DomainError("build_operator: n must be >= 2");
  for (int j = 0; j < m; ++j) {
    if (!(rho1[j] < rho2[j])) throw DomainError("build_operator: rho1 >= rho2 (degenerate strip)");
  }
  const auto r1x = rho1.derivative(1);
  const auto r2x = rho2.derivative(1);
  const auto r1xx = rho1.derivative(2);
  const auto r2xx = rho2.derivative(2);

  StripOperator op{GridFunction2D(m, n, 1.0), GridFunction2D(m, n), GridFunction2D(m, n),
                   GridFunction2D(m, n), {}, {}, {}, {}};
  op.b1_x.resize(m);
  op.b1_y.resize(m);
  op.b2_x.resize(m);
  op.b2_y.resize(m);
  for (int j = 0; j < m; ++j) {
    const double h = rho2[j] - rho1[j];
    const double dslope = r2x[j] - r1x[j];
    const double dcurv = r2xx[j] - r1xx[j];
    for (int l = 0; l <= n; ++l) {
      const double y = static_cast<double>(l) / n;
      const double tilt = y * dslope + r1x[j];
      op.a12(j, l) = -tilt / h;
      op.a22(j, l) = (1.0 + tilt * tilt) / (h * h);
      op.b(j, l) = 2.0 * dslope / (h * h) * tilt - (y * dcurv + r1xx[j]) / h;
    }
    op.b1_x[j] = r1x[j];
    op.b1_y[j] = -(r1x[j] * r1x[j] + 1.0) / h;
    op.b2_x[j] = -r2x[j];
    op.b2_y[j] = (r2x[j] * r2x[j] + 1.0) / h;
  }
  return op;
}

struct EllipticityBounds {
  double lambda = 0.0;  // min over the grid of 1 / |A^{-1}|_F^2
  double Lambda = 0.0;  // max over the grid of the largest symbol eigenvalue
  double min_eigenvalue = 0.0;
  double min_determinant = 0.0;  // min of a11 a22 - a12^2
};

/// The symbol a_ij xi_i xi_j factors as |T xi|^2 with T = [[1, a12], [0, 1/h]];
/// T^{-1} = [[1, -a12 h], [0, h]] gives the Frobenius lower bound.
inline EllipticityBounds ellipticity_bounds(const StripOperator& op) {
  EllipticityBounds out;
  out.lambda = INFINITY;
  out.min_eigenvalue = INFINITY;
  out.min_determinant = INFINITY;
  for (int j = 0; j < op.m(); ++j) {
    for (int l = 0; l <= op.n(); ++l) {
      const double a11 = op.a11(j, l);
      const double a12 = op.a12(j, l);
      const double a22 = op.a22(j, l);
      const double det = a11 * a22 - a12 * a12;
      const double mean = 0.5 * (a11 + a22);
      const double rad = std::hypot(0.5 * (a11 - a22), a12);
      out.Lambda = std::max(out.Lambda, mean + rad);
      out.min_eigenvalue = std::min(out.min_eigenvalue, mean - rad);
      out.min_determinant = std::min(out.min_determinant, det);
      // a22 - a12^2 = 1/h^2
      const double h = 1.0 / std::sqrt(a22 - a12 * a12);
      const double frob2 = 1.0 + a12 * a12 * h * h + h * h;
      out.lambda = std::min(out.lambda, 1.0 / frob2);
    }
  }
  return out;
}

namespace detail {

enum class TopBoundary { kDirichlet, kConormal };

// Assembles and solves  A u + zeroth * u = rhs  on the strip with B1 u = 0 at
// y' = 0 (ghost row eliminated through the boundary operator) and either
// u = top_value or B2 u = 0 at y' = 1. With `pin_origin`, a Lagrange
// multiplier lambda is added to every PDE row and u(0, 0) = 0 is imposed, so
// rhs - lambda is the compatible data actually solved for.
struct StripSolve {
  GridFunction2D u;
  double lambda = 0.0;
};

inline StripSolve solve_strip(const StripOperator& op, double zeroth, const GridFunction2D& rhs,
                              TopBoundary top, double top_value, bool pin_origin) {
  const int m = op.m();
  const int n = op.n();
  const double hx = 2.0 * std::numbers::pi / m;
  const double hy = 1.0 / n;
  const int rows = m * (n + 1);
  const int unknowns = rows + (pin_origin ? 1 : 0);
  auto idx = [m, n](int j, int l) { return ((j % m + m) % m) * (n + 1) + l; };

  // u_y = beta u_x on the boundary rows
  std::vector<double> beta1(m), beta2(m);
  for (int j = 0; j < m; ++j) {
    beta1[j] = -op.b1_x[j] / op.b1_y[j];
    beta2[j] = -op.b2_x[j] / op.b2_y[j];
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(rows) * 14 + (pin_origin ? rows + 1 : 0));
  Eigen::VectorXd f = Eigen::VectorXd::Zero(unknowns);

  for (int j = 0; j < m; ++j) {
    for (int l = 0; l <= n; ++l) {
      const int row = idx(j, l);
      if (l == n && top == TopBoundary::kDirichlet) {
        trip.emplace_back(row, row, 1.0);
        f[row] = top_value;
        continue;
      }
      auto add = [&](int jj, int ll, double v) {
        if (ll == -1) {
          // u_{j,-1} = u_{j,1} - (hy/hx) beta1_j (u_{j+1,0} - u_{j-1,0})
          const int jc = ((jj % m) + m) % m;
          const double t = hy / hx * beta1[jc];
          trip.emplace_back(row, idx(jj, 1), v);
          trip.emplace_back(row, idx(jj + 1, 0), -v * t);
          trip.emplace_back(row, idx(jj - 1, 0), v * t);
        } else if (ll == n + 1) {
          // u_{j,n+1} = u_{j,n-1} + (hy/hx) beta2_j (u_{j+1,n} - u_{j-1,n})
          const int jc = ((jj % m) + m) % m;
          const double t = hy / hx * beta2[jc];
          trip.emplace_back(row, idx(jj, n - 1), v);
          trip.emplace_back(row, idx(jj + 1, n), v * t);
          trip.emplace_back(row, idx(jj - 1, n), -v * t);
        } else {
          trip.emplace_back(row, idx(jj, ll), v);
        }
      };
      const double cxx = op.a11(j, l) / (hx * hx);
      const double cxy = 2.0 * op.a12(j, l) / (4.0 * hx * hy);
      const double cyy = op.a22(j, l) / (hy * hy);
      const double cy = op.b(j, l) / (2.0 * hy);
      add(j, l, -2.0 * cxx - 2.0 * cyy + zeroth);
      add(j + 1, l, cxx);
      add(j - 1, l, cxx);
      add(j, l + 1, cyy + cy);
      add(j, l - 1, cyy - cy);
      add(j + 1, l + 1, cxy);
      add(j + 1, l - 1, -cxy);
      add(j - 1, l + 1, -cxy);
      add(j - 1, l - 1, cxy);
      if (pin_origin) trip.emplace_back(row, rows, 1.0);
      f[row] = rhs(j, l);
    }
  }
  if (pin_origin) {
    trip.emplace_back(rows, idx(0, 0), 1.0);
    f[rows] = 0.0;
  }

  Eigen::SparseMatrix<double> A(unknowns, unknowns);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    throw SolveError("strip solve: factorization failed", INFINITY);
  }
  Eigen::VectorXd sol = lu.solve(f);
  const double residual = (A * sol - f).lpNorm<Eigen::Infinity>();
  const double scale = 1.0 + f.lpNorm<Eigen::Infinity>();
  if (lu.info() != Eigen::Success || !std::isfinite(residual) || residual > 1e-8 * scale) {
    throw SolveError("strip solve: linear solve breakdown", residual);
  }

  StripSolve out{GridFunction2D(m, n), pin_origin ? sol[rows] : 0.0};
  // the pin holds only to rounding; make it exact
  const double origin = pin_origin ? sol[idx(0, 0)] : 0.0;
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l <= n; ++l) out.u(j, l) = sol[idx(j, l)] - origin;
  }
  return out;
}

// Weights of the y-quadrature: composite Simpson for even n, trapezoid otherwise.
inline std::vector<double> y_weights(int n) {
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  const double h = 1.0 / n;
  if (n % 2 == 0) {
    for (int l = 0; l <= n; ++l) w[l] = (l == 0 || l == n) ? h / 3 : (l % 2 ? 4 * h / 3 : 2 * h / 3);
  } else {
    for (int l = 0; l <= n; ++l) w[l] = (l == 0 || l == n) ? h / 2 : h;
  }
  return w;
}

}  // namespace detail

/// Nutrient R(rho1, rho2) sigma_bar: A s = s, B1 s = 0, s = sigma_bar at y' = 1.
inline GridFunction2D solve_nutrient(const BoundaryCurve& rho1, const BoundaryCurve& rho2,
                                     double sigma_bar, int n) {
  if (n < 16) throw DomainError("solve_nutrient: n must be >= 16");
  const StripOperator op = build_operator(rho1, rho2, n);
  GridFunction2D zero(op.m(), n);
  return detail::solve_strip(op, -1.0, zero, detail::TopBoundary::kDirichlet, sigma_bar, false).u;
}

/// Phi = mean over x of the integral over y' of (sigma - sigma_tilde)(rho2 - rho1),
/// sigma from an already computed nutrient field.
inline double phi_from_nutrient(const GridFunction2D& sigma, const BoundaryCurve& rho1,
                                const BoundaryCurve& rho2, double sigma_tilde) {
  const int m = sigma.m();
  const int n = sigma.n();
  const auto w = detail::y_weights(n);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    double col = 0.0;
    for (int l = 0; l <= n; ++l) col += w[l] * (sigma(j, l) - sigma_tilde);
    total += col * (rho2[j] - rho1[j]);
  }
  return total / m;
}

/// Solvability functional of the pure-Neumann pressure problem.
///
/// The x-integral is taken against dx / (2 pi), so that the directional
/// derivative at a flat equilibrium is sigma_bar (1 - tanh(d)/d - tanh(d)^2).
inline double phi(const BoundaryCurve& rho1, const BoundaryCurve& rho2, const ModelParams& params,
                  int n) {
  const GridFunction2D sigma = solve_nutrient(rho1, rho2, params.sigma_bar, n);
  return phi_from_nutrient(sigma, rho1, rho2, params.sigma_tilde);
}

/// Centered difference of Phi along (0, 1), a rigid raise of rho2.
inline double phi_prime_up(const BoundaryCurve& rho1, const BoundaryCurve& rho2,
                           const ModelParams& params, int n, double eps) {
  if (!(eps >= 1e-6 && eps <= 1e-2)) throw DomainError("phi_prime_up: eps must lie in [1e-6, 1e-2]");
  const double up = phi(rho1, rho2.raised(eps), params, n);
  const double down = phi(rho1, rho2.raised(-eps), params, n);
  return (up - down) / (2.0 * eps);
}

struct PressureOptions {
  // |Phi| above this is treated as an incompatible pure-Neumann problem.
  double compatibility_threshold = 1e-4 * 2.0 * std::numbers::pi;
};

struct PressureSolution {
  GridFunction2D p;     // zero at the origin node (x = 0, y' = 0)
  double projection = 0.0;  // constant removed from the right-hand side
  double phi = 0.0;
};

/// Pressure T(rho1, rho2): A p = -mu (R sigma_bar - sigma_tilde), B1 p = B2 p = 0,
/// normalized to vanish at the origin.
inline PressureSolution solve_pressure_neumann(const BoundaryCurve& rho1, const BoundaryCurve& rho2,
                                               const ModelParams& params, int n,
                                               const PressureOptions& opts = {}) {
  if (n < 16) throw DomainError("solve_pressure_neumann: n must be >= 16");
  const StripOperator op = build_operator(rho1, rho2, n);
  GridFunction2D zero(op.m(), n);
  const GridFunction2D sigma =
      detail::solve_strip(op, -1.0, zero, detail::TopBoundary::kDirichlet, params.sigma_bar, false).u;
  const double phi_value = phi_from_nutrient(sigma, rho1, rho2, params.sigma_tilde);
  if (std::fabs(phi_value) > opts.compatibility_threshold) {
    throw UnsolvableError("solve_pressure_neumann: Phi too large, Neumann problem unsolvable",
                          phi_value);
  }
  GridFunction2D rhs(op.m(), n);
  for (int j = 0; j < op.m(); ++j) {
    for (int l = 0; l <= n; ++l) rhs(j, l) = -params.mu * (sigma(j, l) - params.sigma_tilde);
  }
  auto solved = detail::solve_strip(op, 0.0, rhs, detail::TopBoundary::kConormal, 0.0, true);
  return {std::move(solved.u), solved.lambda, phi_value};
}

/// Traces S_i = mu tr_i T(R sigma_bar - sigma_tilde) on both interfaces.
struct PressureTraces {
  std::vector<double> lower;  // S_1
  std::vector<double> upper;  // S_2
  double phi = 0.0;
  double projection = 0.0;
};

inline PressureTraces pressure_traces(const BoundaryCurve& rho1, const BoundaryCurve& rho2,
                                      const ModelParams& params, int n,
                                      const PressureOptions& opts = {}) {
  const PressureSolution ps = solve_pressure_neumann(rho1, rho2, params, n, opts);
  return {ps.p.row(0), ps.p.row(n), ps.phi, ps.projection};
}

/// c0 = -mean(S_2 - gamma2 kappa(rho2)), the constant that makes the second
/// residual component mean-free.
inline double balancing_c0(const PressureTraces& traces, const BoundaryCurve& rho2, double gamma2) {
  const auto kappa = curvature(rho2);
  double mean = 0.0;
  for (std::size_t j = 0; j < kappa.size(); ++j) mean += traces.upper[j] - gamma2 * kappa[j];
  return -mean / static_cast<double>(kappa.size());
}

struct BifurcationResidual {
  std::vector<double> res1;
  std::vector<double> res2;
  double phi_value = 0.0;
};

/// F(rho1, rho2, gamma1, gamma2) from precomputed traces:
///   res1 = S_1 + c0 + c - gamma1 kappa(rho1),  res2 = S_2 + c0 - gamma2 kappa(rho2).
inline BifurcationResidual residual_from_traces(const PressureTraces& traces,
                                                const BoundaryCurve& rho1, const BoundaryCurve& rho2,
                                                double gamma1, double gamma2, double c0,
                                                double c_value) {
  const auto k1 = curvature(rho1);
  const auto k2 = curvature(rho2);
  BifurcationResidual out;
  out.res1.resize(k1.size());
  out.res2.resize(k2.size());
  for (std::size_t j = 0; j < k1.size(); ++j) {
    out.res1[j] = traces.lower[j] + c0 + c_value - gamma1 * k1[j];
    out.res2[j] = traces.upper[j] + c0 - gamma2 * k2[j];
  }
  out.phi_value = traces.phi;
  return out;
}

inline BifurcationResidual bifurcation_residual(const BoundaryCurve& rho1, const BoundaryCurve& rho2,
                                                double gamma1, double gamma2, double c0,
                                                const ModelParams& params, const FlatStationary& fs,
                                                int n, const PressureOptions& opts = {}) {
  const PressureTraces traces = pressure_traces(rho1, rho2, params, n, opts);
  return residual_from_traces(traces, rho1, rho2, gamma1, gamma2, c0, fs.c_value());
}

struct GateauxGap {
  double gap = 0.0;         // max |D_eps + b_{r,s}(sigma*)| over the grid
  double derivative = 0.0;  // max |D_eps|
};

/// Audits the sign convention of the linearized nutrient forcing. D_eps is the
/// forward difference (A(rho* + eps (r, s)) - A(rho*)) sigma_0 / eps applied to
/// the flat nutrient profile sigma_0(y') = sigma*(y' delta + rho1*); moving it
/// to the right-hand side of the linearized equation should reproduce
/// b_{r,s}(sigma*), so the gap is O(eps). Reported, never asserted.
inline GateauxGap linearization_gateaux_gap(const FlatStationary& fs, const ModeCoefficients& mode,
                                            double eps, int n, int m = 32) {
  if (!(eps >= 1e-6 && eps <= 1e-3)) {
    throw DomainError("linearization_gateaux_gap: eps must lie in [1e-6, 1e-3]");
  }
  std::vector<double> r(static_cast<std::size_t>(m)), s(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double x = BoundaryCurve::node(j, m);
    r[j] = mode.a * std::cos(mode.k * x) + mode.b * std::sin(mode.k * x);
    s[j] = mode.c * std::cos(mode.k * x) + mode.d * std::sin(mode.k * x);
  }
  const auto rho1 = BoundaryCurve::constant(m, fs.rho1_star());
  const auto rho2 = BoundaryCurve::constant(m, fs.rho2_star());
  const StripOperator base = build_operator(rho1, rho2, n);
  const StripOperator moved = build_operator(rho1.perturbed(r, eps), rho2.perturbed(s, eps), n);
  const auto rxx = spectral_derivative(r, 2);
  const auto sxx = spectral_derivative(s, 2);
  const double d = fs.delta();

  GateauxGap out;
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l <= n; ++l) {
      const double y = static_cast<double>(l) / n;
      const double phys = y * d + fs.rho1_star();
      // sigma_0' = delta sigma*', sigma_0'' = delta^2 sigma*''
      const double s1 = d * fs.sigma_prime(phys);
      const double s2 = d * d * fs.sigma_second(phys);
      const double applied_moved = moved.a22(j, l) * s2 + moved.b(j, l) * s1;
      const double applied_base = base.a22(j, l) * s2 + base.b(j, l) * s1;
      const double deriv = (applied_moved - applied_base) / eps;
      const double forcing = 2.0 / d * (s[j] - r[j]) * fs.sigma_second(phys) +
                             (y * (sxx[j] - rxx[j]) + rxx[j]) * fs.sigma_prime(phys);
      out.gap = std::max(out.gap, std::fabs(deriv + forcing));
      out.derivative = std::max(out.derivative, std::fabs(deriv));
    }
  }
  return out;
}

}  // namespace necrotic
