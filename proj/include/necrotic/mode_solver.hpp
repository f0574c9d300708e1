#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "necrotic/errors.hpp"
#include "necrotic/hyperbolic.hpp"
#include "necrotic/stationary.hpp"

namespace necrotic {

/// A function on [0, 1] in the scaled normal coordinate y'.
using Profile = std::function<double(double)>;

/// Samples `f` on the uniform grid y_l = l/n, l = 0..n.
inline std::vector<double> sample(const Profile& f, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int l = 0; l <= n; ++l) out[l] = f(static_cast<double>(l) / n);
  return out;
}

/// One Fourier mode of the interface perturbations:
///   r = a cos(kx) + b sin(kx),  s = c cos(kx) + d sin(kx).
struct ModeCoefficients {
  int k = 1;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  /// The sine channel expressed as a cosine-channel mode (a <- b, c <- d).
  ModeCoefficients sine_channel() const { return {k, b, 0.0, d, 0.0}; }
};

// Forcing of the mode-k nutrient problem, b_{r,s}(sigma*) projected on cos(kx).
inline Profile forcing_f(const ModeCoefficients& mode, const FlatStationary& fs) {
  const double d = fs.delta();
  const double sb = fs.params().sigma_bar;
  const double k2 = static_cast<double>(mode.k) * mode.k;
  const double a = mode.a;
  const double diff = mode.c - mode.a;
  const double ch = std::cosh(d);
  return [=](double y) {
    return 2.0 * sb * diff / (d * ch) * std::cosh(y * d) - k2 * sb * a / ch * std::sinh(y * d) -
           k2 * sb * diff / ch * y * std::sinh(y * d);
  };
}

/// Sine-channel forcing g_k.
inline Profile forcing_g(const ModeCoefficients& mode, const FlatStationary& fs) {
  return forcing_f(mode.sine_channel(), fs);
}

// Pressure forcing b_{r,s}(p*) projected on cos(kx) (without the -mu A_k part).
inline Profile forcing_f_tilde(const ModeCoefficients& mode, const FlatStationary& fs) {
  const double d = fs.delta();
  const ModelParams& p = fs.params();
  const double k2 = static_cast<double>(mode.k) * mode.k;
  const double a = mode.a;
  const double diff = mode.c - mode.a;
  const double ch = std::cosh(d);
  return [=](double y) {
    return 2.0 / d * p.mu * p.sigma_tilde * diff - p.mu * k2 * p.sigma_tilde * d * a * y -
           p.mu * k2 * p.sigma_tilde * d * diff * y * y +
           p.mu * k2 * p.sigma_bar * a / ch * std::sinh(y * d) -
           2.0 * p.mu * p.sigma_bar * diff / (d * ch) * std::cosh(y * d) +
           p.mu * k2 * p.sigma_bar * diff / ch * y * std::sinh(y * d);
  };
}

/// Zeroth nutrient mode A_0.
inline Profile closed_A0(const ModeCoefficients& mode, const FlatStationary& fs) {
  if (mode.k != 0) throw MisuseError("closed_A0 requires k = 0");
  const double d = fs.delta();
  const double pre = fs.params().sigma_bar * (mode.c - mode.a) / std::cosh(d);
  const double th = std::tanh(d);
  return [=](double y) { return pre * (y * std::sinh(y * d) - th * std::cosh(y * d)); };
}

/// Nutrient mode A_k, k >= 1, solving A''/delta^2 - (1+k^2) A = f_k,
/// A'(0) = 0, A(1) = 0.
inline Profile closed_Ak(const ModeCoefficients& mode, const FlatStationary& fs) {
  if (mode.k < 1) throw MisuseError("closed_Ak requires k >= 1 (use closed_A0)");
  const double d = fs.delta();
  const double sb = fs.params().sigma_bar;
  const double q = std::sqrt(1.0 + static_cast<double>(mode.k) * mode.k);
  const double big = d * q;
  const double ch = std::cosh(d);
  const double th = std::tanh(d);
  const double a = mode.a;
  const double c = mode.c;
  return [=](double y) {
    return sb * a / (q * ch) * hyp::sinh_over_cosh(big * (1.0 - y), big) -
           sb * c * th * hyp::cosh_over_cosh(big * y, big) + sb * a / ch * std::sinh(y * d) +
           sb * (c - a) / ch * y * std::sinh(y * d);
  };
}

/// Sine-channel nutrient mode B_k.
inline Profile closed_Bk(const ModeCoefficients& mode, const FlatStationary& fs) {
  return closed_Ak(mode.sine_channel(), fs);
}

enum class Solvability { kSolvable, kUnsolvable };

struct M0Verdict {
  Solvability status = Solvability::kUnsolvable;
  double mismatch = 0.0;  // c_0 - a_0
  bool solvable() const { return status == Solvability::kSolvable; }
};

/// The k = 0 pressure problem (four boundary conditions on a second-order ODE)
/// admits a solution iff c_0 = a_0, and the solution is then M_0 = 0.
inline M0Verdict check_M0(const ModeCoefficients& mode) {
  if (mode.k != 0) throw MisuseError("check_M0 requires k = 0");
  const double mismatch = mode.c - mode.a;
  return {mismatch == 0.0 ? Solvability::kSolvable : Solvability::kUnsolvable, mismatch};
}

/// Pressure mode M_k, k >= 1, the unique solution of
/// M''/delta^2 - k^2 M = -mu A_k + f~_k with M'(0) = M'(1) = 0.
inline Profile closed_Mk(const ModeCoefficients& mode, const FlatStationary& fs) {
  if (mode.k < 1) throw MisuseError("closed_Mk requires k >= 1");
  const double d = fs.delta();
  const ModelParams& p = fs.params();
  const double kk = mode.k;
  const double q = std::sqrt(1.0 + kk * kk);
  const double dk = d * kk;
  const double dq = d * q;
  const double ch = std::cosh(d);
  const double th = std::tanh(d);
  const double a = mode.a;
  const double c = mode.c;
  // Bracket of the cosh(y' delta k)/sinh(delta k) term with its cosh(delta k)
  // part folded into the sinh(y' delta k) term.
  const double bracket = p.sigma_bar * d * a / ch * hyp::sech(dq) +
                         p.sigma_bar * c * dq * th * std::tanh(dq) + p.sigma_bar * c * th -
                         d * p.sigma_bar * c;
  return [=](double y) {
    return -p.mu / dk * hyp::cosh_over_sinh(dk * y, dk) * bracket +
           p.mu * p.sigma_tilde * a / kk * hyp::cosh_over_sinh(dk * (1.0 - y), dk) -
           p.mu * p.sigma_bar * a / (q * ch) * hyp::sinh_over_cosh(dq * (1.0 - y), dq) +
           p.mu * p.sigma_bar * c * th * hyp::cosh_over_cosh(dq * y, dq) -
           p.mu * p.sigma_bar * a / ch * std::sinh(d * y) -
           p.mu * p.sigma_bar * (c - a) / ch * y * std::sinh(d * y) +
           p.mu * p.sigma_tilde * d * a * y + p.mu * p.sigma_tilde * d * (c - a) * y * y;
  };
}

/// Sine-channel pressure mode N_k.
inline Profile closed_Nk(const ModeCoefficients& mode, const FlatStationary& fs) {
  return closed_Mk(mode.sine_channel(), fs);
}

/// The three bracket groups of gamma_1 (before the common prefactor
/// mu sigma_bar / (delta k^3 sinh(delta k))). As k grows they tend to +inf,
/// delta - (1 + delta^2/2) tanh(delta) (for c_k = a_k) and 0.
struct Gamma1Groups {
  double leading = 0.0;
  double middle = 0.0;
  double trailing = 0.0;
};

inline Gamma1Groups gamma1_bracket_groups(int k, const FlatStationary& fs, double ratio_ck_ak) {
  if (k < 1) throw MisuseError("gamma1 requires k >= 1");
  const double d = fs.delta();
  const double kk = k;
  const double q = std::sqrt(1.0 + kk * kk);
  const double th = std::tanh(d);
  const double ch = std::cosh(d);
  Gamma1Groups g;
  g.leading = std::cosh(d * kk) * th - d * kk * std::tanh(d * q) * std::sinh(d * kk) / (q * ch);
  // k sinh(dk)/cosh(dq) - q tanh(dq), overflow-free
  const double mixed = kk * hyp::sinh_over_cosh(d * kk, d * q) - q * std::tanh(d * q);
  g.middle = ratio_ck_ak * d * (1.0 - fs.params().ratio() + th * mixed);
  g.trailing = -d / ch * hyp::sech(d * q);
  return g;
}

/// Surface tension on the necrotic interface making mode k stationary:
/// gamma_1 = M_k(0) / (k^2 a_k).
inline double gamma1(int k, const FlatStationary& fs, double ratio_ck_ak) {
  if (k < 1) throw MisuseError("gamma1 requires k >= 1");
  const double d = fs.delta();
  const ModelParams& p = fs.params();
  const double kk = k;
  const double q = std::sqrt(1.0 + kk * kk);
  const double dk = d * kk;
  const double dq = d * q;
  const double th = std::tanh(d);
  const double ch = std::cosh(d);
  const double csch_k = hyp::csch(dk);
  // bracket / sinh(delta k), term by term
  const double first = hyp::coth(dk) * th - dk * std::tanh(dq) / (q * ch);
  const double second =
      ratio_ck_ak * d *
      ((1.0 - p.ratio()) * csch_k + th * (kk * hyp::sech(dq) - q * std::tanh(dq) * csch_k));
  const double third = -d / ch * hyp::sech(dq) * csch_k;
  return p.mu * p.sigma_bar / (d * kk * kk * kk) * (first + second + third);
}

/// Bracket of gamma_2 (before mu sigma_bar / (delta k^3 tanh(delta k))); tends to
/// delta - tanh(delta) as k grows.
inline double gamma2_bracket(int k, const FlatStationary& fs, double ratio_ak_ck) {
  if (k < 1) throw MisuseError("gamma2 requires k >= 1");
  const double d = fs.delta();
  const double kk = k;
  const double q = std::sqrt(1.0 + kk * kk);
  const double th = std::tanh(d);
  // k tanh(dk) - q tanh(dq) = (k - q) - k (1 - tanh dk) + q (1 - tanh dq)
  const double tanh_gap =
      -1.0 / (kk + q) - kk * hyp::one_minus_tanh(d * kk) + q * hyp::one_minus_tanh(d * q);
  return ratio_ak_ck * (th * hyp::sech(d * kk) - d / std::cosh(d) * hyp::sech(d * q)) +
         d * th * tanh_gap + d - th;
}

/// Surface tension on the outer interface making mode k stationary:
/// gamma_2 = M_k(1) / (k^2 c_k).
inline double gamma2(int k, const FlatStationary& fs, double ratio_ak_ck) {
  const double bracket = gamma2_bracket(k, fs, ratio_ak_ck);
  const double d = fs.delta();
  const double kk = k;
  return fs.params().mu * fs.params().sigma_bar / (d * kk * kk * kk * std::tanh(d * kk)) * bracket;
}

struct GammaRow {
  int k = 0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// gamma_1(k), gamma_2(k) for k = 1..k_max at a fixed amplitude ratio c_k/a_k.
inline std::vector<GammaRow> gamma_sweep(const FlatStationary& fs, int k_max, double ratio = 1.0) {
  if (k_max < 1) throw DomainError("gamma_sweep: k_max must be >= 1");
  if (ratio == 0.0) throw DomainError("gamma_sweep: ratio c_k/a_k must be nonzero");
  std::vector<GammaRow> rows;
  rows.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    rows.push_back({k, gamma1(k, fs, ratio), gamma2(k, fs, 1.0 / ratio)});
  }
  return rows;
}

/// Smallest k0 such that both gammas are positive for all k0 <= k <= k_max,
/// or k_max + 1 if the last row is not positive.
inline int positivity_threshold(const std::vector<GammaRow>& rows) {
  int k0 = rows.empty() ? 1 : rows.back().k + 1;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (!(it->gamma1 > 0.0 && it->gamma2 > 0.0)) break;
    k0 = it->k;
  }
  return k0;
}

/// Nontrivial solution of the stationary linearized problem for one mode:
///   Sigma = A cos(kx) + B sin(kx),  P = M cos(kx) + N sin(kx).
struct ModeSolution {
  ModeCoefficients mode;
  Profile A;
  Profile B;
  Profile M;
  Profile N;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

inline ModeSolution assemble_mode(const ModeCoefficients& mode, const FlatStationary& fs) {
  if (mode.k < 1) throw MisuseError("assemble_mode requires k >= 1");
  const double r2 = mode.a * mode.a + mode.b * mode.b;
  const double s2 = mode.c * mode.c + mode.d * mode.d;
  if (r2 == 0.0 || s2 == 0.0) {
    throw InvalidModeError("assemble_mode: (a_k, b_k) and (c_k, d_k) must be nonzero");
  }
  const double cross = mode.a * mode.d - mode.b * mode.c;
  if (std::fabs(cross) > 1e-12 * std::sqrt(r2 * s2)) {
    throw InvalidModeError("assemble_mode: a_k d_k != b_k c_k");
  }
  // r and s are parallel; read the ratio from whichever channel is populated.
  const bool use_cos = std::fabs(mode.a) >= std::fabs(mode.b);
  const double r = use_cos ? mode.a : mode.b;
  const double s = use_cos ? mode.c : mode.d;
  if (s == 0.0) throw InvalidModeError("assemble_mode: a_k, c_k must be nonzero");

  ModeSolution sol;
  sol.mode = mode;
  sol.A = closed_Ak(mode, fs);
  sol.B = closed_Bk(mode, fs);
  sol.M = closed_Mk(mode, fs);
  sol.N = closed_Nk(mode, fs);
  sol.gamma1 = gamma1(mode.k, fs, s / r);
  sol.gamma2 = gamma2(mode.k, fs, r / s);
  return sol;
}

}  // namespace necrotic
