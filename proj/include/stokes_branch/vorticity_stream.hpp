#pragma once

// Polynomial vorticity functions and the uniform (flat-surface) shear stream
// U'' + omega(U) = 0, U(0) = 0, U(d) = 1, U'(d)^2/2 + d = R, solved both in
// the physical variable Y and in the hodograph variable p = U.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "stokes_branch/error.hpp"
#include "stokes_branch/numerics.hpp"

namespace stokes_branch {

/// Dense real polynomial sum_k c_k x^k.
class Polynomial {
 public:
  Polynomial() : c_{0.0} {}
  explicit Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
    if (c_.empty()) c_.push_back(0.0);
  }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() == 1) return Polynomial{};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const {
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(a));
  }

  const std::vector<double>& coefficients() const { return c_; }

 private:
  std::vector<double> c_;
};

/// Vorticity omega(p), p in [0, 1], with exact omega' and Omega = int_0^p omega.
class VorticitySpec {
 public:
  VorticitySpec() : VorticitySpec(std::vector<double>{0.0}) {}
  explicit VorticitySpec(std::vector<double> coefficients)
      : omega_(std::move(coefficients)),
        omega_prime_(omega_.derivative()),
        Omega_(omega_.antiderivative()) {
    for (double c : omega_.coefficients()) {
      if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
    }
  }

  static VorticitySpec constant(double value) { return VorticitySpec({value}); }

  double omega(double p) const { return omega_(p); }
  double omega_prime(double p) const { return omega_prime_(p); }
  double Omega(double tau) const { return Omega_(tau); }

  const Polynomial& omega_polynomial() const { return omega_; }
  const Polynomial& Omega_polynomial() const { return Omega_; }
  const std::vector<double>& coefficients() const { return omega_.coefficients(); }

  bool is_zero() const {
    return std::all_of(coefficients().begin(), coefficients().end(),
                       [](double c) { return c == 0.0; });
  }

 private:
  Polynomial omega_;
  Polynomial omega_prime_;
  Polynomial Omega_;
};

inline double omega_integral(const VorticitySpec& vort, double tau) { return vort.Omega(tau); }

namespace detail {

struct OmegaMaximum {
  double value = 0.0;
  std::vector<double> points;
};

// Interior critical points of Omega (sign changes of omega).
inline std::vector<double> omega_critical_points(const VorticitySpec& vort) {
  std::vector<double> out;
  const auto& w = vort.omega_polynomial();
  for (const auto& [lo, hi] : numerics::sign_change_brackets(w, 0.0, 1.0, 2049)) {
    out.push_back(numerics::find_root(w, lo, hi, 1e-15));
  }
  return out;
}

// Endpoints are always candidates for the maximum.
inline OmegaMaximum omega_maximum(const VorticitySpec& vort) {
  std::vector<double> candidates{0.0, 1.0};
  for (double t : omega_critical_points(vort)) candidates.push_back(t);
  OmegaMaximum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (double t : candidates) best.value = std::max(best.value, vort.Omega(t));
  const double slack = 1e-13 * std::max(1.0, std::abs(best.value));
  for (double t : candidates) {
    if (vort.Omega(t) >= best.value - slack) best.points.push_back(t);
  }
  std::sort(best.points.begin(), best.points.end());
  best.points.erase(std::unique(best.points.begin(), best.points.end()), best.points.end());
  return best;
}

// int_0^1 g(s^2 - 2 Omega(tau)) dtau. The radicand is smallest at critical
// points of Omega, so the interval is split there and each piece is
// integrated with endpoint clustering; this stays accurate as s -> s0.
template <class G>
double radicand_integral(const VorticitySpec& vort, double s, G&& g, const Tolerances& tol) {
  std::vector<double> cuts{0.0};
  for (double t : omega_critical_points(vort)) {
    if (t > cuts.back() + 1e-12 && t < 1.0 - 1e-12) cuts.push_back(t);
  }
  cuts.push_back(1.0);
  const double s2 = s * s;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += numerics::integrate_endpoint_peaked(
        [&](double t) { return g(s2 - 2.0 * vort.Omega(t)); }, cuts[i], cuts[i + 1],
        std::min(tol.quad_rel, 1e-12));
  }
  return total;
}

inline void check_radicand(const VorticitySpec& vort, double s, const Tolerances& tol) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorKind::InvalidArgument, "surface shear s must be positive and finite");
  }
  const double margin = s * s - 2.0 * omega_maximum(vort).value;
  if (margin < tol.radicand) {
    throw Error(ErrorKind::NearCritical,
                "s^2 - 2 max Omega = " + std::to_string(margin) + " is below the guard");
  }
}

}  // namespace detail

/// s0 = 2 sqrt(max_{[0,1]} Omega).
inline double s_floor(const VorticitySpec& vort) {
  return 2.0 * std::sqrt(std::max(0.0, detail::omega_maximum(vort).value));
}

/// d(s) = int_0^1 dtau / sqrt(s^2 - 2 Omega(tau)).
inline double depth(const VorticitySpec& vort, double s, const Tolerances& tol = {}) {
  detail::check_radicand(vort, s, tol);
  return detail::radicand_integral(vort, s, [](double r) { return 1.0 / std::sqrt(r); }, tol);
}

/// int_0^1 (s^2 - 2 Omega)^(-3/2) dtau, which equals 1/F^2 and -d'(s)/s.
inline double inverse_froude_squared(const VorticitySpec& vort, double s,
                                     const Tolerances& tol = {}) {
  detail::check_radicand(vort, s, tol);
  return detail::radicand_integral(
      vort, s, [](double r) { return 1.0 / (r * std::sqrt(r)); }, tol);
}

inline double depth_derivative(const VorticitySpec& vort, double s, const Tolerances& tol = {}) {
  return -s * inverse_froude_squared(vort, s, tol);
}

/// R(s) = s^2/2 + d(s) - Omega(1).
inline double bernoulli_R(const VorticitySpec& vort, double s, const Tolerances& tol = {}) {
  return 0.5 * s * s + depth(vort, s, tol) - vort.Omega(1.0);
}

/// R'(s) = s (1 - F^-2(s)).
inline double bernoulli_R_derivative(const VorticitySpec& vort, double s,
                                     const Tolerances& tol = {}) {
  return s * (1.0 - inverse_froude_squared(vort, s, tol));
}

struct CriticalPoint {
  double s_c = 0.0;
  double R_c = 0.0;
  // R(s0+); +infinity when d(s) diverges as s decreases to s0.
  double R_0 = 0.0;
};

namespace detail {

// lim_{s -> s0+} d(s). Finite unless the radicand vanishes to second order
// somewhere in [0, 1]; endpoint square-root singularities are removed with
// tau = u^2 (at 0) and tau = 1 - u^2 (at 1).
inline double depth_at_floor(const VorticitySpec& vort, const Tolerances& tol) {
  const auto mx = omega_maximum(vort);
  const double s0 = 2.0 * std::sqrt(std::max(0.0, mx.value));
  if (mx.value > 0.0) return depth(vort, s0, tol);
  const double inf = std::numeric_limits<double>::infinity();
  bool sing0 = false;
  bool sing1 = false;
  for (double t : mx.points) {
    if (t > 0.0 && t < 1.0) return inf;
    if (t == 0.0) {
      if (!(vort.omega(0.0) < -1e-12)) return inf;
      sing0 = true;
    }
    if (t == 1.0) {
      if (!(vort.omega(1.0) > 1e-12)) return inf;
      sing1 = true;
    }
  }
  auto g = [&](double t) { return 1.0 / std::sqrt(-2.0 * vort.Omega(t)); };
  const double half = std::sqrt(0.5);
  double left = sing0 ? numerics::integrate(
                            [&](double u) { return u == 0.0 ? std::sqrt(2.0 / -vort.omega(0.0))
                                                            : 2.0 * u * g(u * u); },
                            0.0, half, tol.quad_abs, tol.quad_rel)
                      : numerics::integrate(g, 0.0, 0.5, tol.quad_abs, tol.quad_rel);
  double right = sing1 ? numerics::integrate(
                             [&](double u) { return u == 0.0 ? std::sqrt(2.0 / vort.omega(1.0))
                                                             : 2.0 * u * g(1.0 - u * u); },
                             0.0, half, tol.quad_abs, tol.quad_rel)
                       : numerics::integrate(g, 0.5, 1.0, tol.quad_abs, tol.quad_rel);
  return left + right;
}

// Smallest s admitted by the radicand guard, never below s0.
inline double lowest_admissible_s(const VorticitySpec& vort, const Tolerances& tol) {
  const auto mx = omega_maximum(vort);
  const double s0 = 2.0 * std::sqrt(std::max(0.0, mx.value));
  const double guard = std::sqrt(2.0 * mx.value + 2.0 * tol.radicand);
  return std::max(s0, guard);
}

}  // namespace detail

/// Minimizer s_c and minimum R_c of R(s) over s > s0, plus R_0 = R(s0+).
/// R'(s) = s(1 - F^-2(s)) and F^-2 decreases in s, so the minimum is the
/// unique sign change of R' inside the scan window [s0 + 1e-4, s0 + 50].
inline CriticalPoint critical_point(const VorticitySpec& vort, const Tolerances& tol = {}) {
  const double s0 = s_floor(vort);
  const double lo = std::max(s0 + 1e-4, detail::lowest_admissible_s(vort, tol));
  const double hi = s0 + 50.0;
  auto dR = [&](double s) { return bernoulli_R_derivative(vort, s, tol); };

  // Coarse geometric scan for the bracket, then a bracketed root of R'.
  const std::size_t n = 241;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  std::size_t k = n;
  double prev = dR(grid[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = dR(grid[i]);
    if (prev < 0.0 && cur >= 0.0) {
      k = i;
      break;
    }
    prev = cur;
  }
  if (k == n) {
    throw Error(ErrorKind::NoInteriorMinimum,
                "R(s) has no interior minimum in [s0 + 1e-4, s0 + 50]");
  }
  CriticalPoint cp;
  cp.s_c = numerics::find_root(dR, grid[k - 1], grid[k], 1e-12);
  cp.R_c = bernoulli_R(vort, cp.s_c, tol);
  const double d0 = detail::depth_at_floor(vort, tol);
  cp.R_0 = std::isfinite(d0) ? 0.5 * s0 * s0 + d0 - vort.Omega(1.0)
                             : std::numeric_limits<double>::infinity();
  return cp;
}

/// The subcritical solution s in (s0, s_c) of R(s) = R, the stream that
/// carries small-amplitude Stokes waves.
inline double s_from_R(const VorticitySpec& vort, double R, const Tolerances& tol = {}) {
  const auto cp = critical_point(vort, tol);
  if (!(R > cp.R_c)) {
    throw Error(ErrorKind::NoRoot, "R = " + std::to_string(R) + " does not exceed R_c = " +
                                       std::to_string(cp.R_c));
  }
  if (!(R < cp.R_0)) {
    throw Error(ErrorKind::NoRoot, "R = " + std::to_string(R) + " is not below R_0 = " +
                                       std::to_string(cp.R_0));
  }
  const double lo = detail::lowest_admissible_s(vort, tol);
  auto g = [&](double s) { return bernoulli_R(vort, s, tol) - R; };
  return numerics::find_root(g, lo, cp.s_c, tol.root);
}

/// One uniform stream with sampled profiles in both variables.
struct StreamSolution {
  VorticitySpec vorticity;
  Tolerances tol;
  double s = 0.0;
  double d = 0.0;
  double R = 0.0;
  double kappa = 0.0;
  double froude = 0.0;
  std::vector<double> grid_Y;
  std::vector<double> U_samples;
  std::vector<double> grid_p;
  std::vector<double> H_samples;
  std::vector<double> Hp_samples;

  /// Exact H_p(p) = (s^2 - 2 Omega(p))^(-1/2).
  double Hp_at(double p) const { return 1.0 / std::sqrt(s * s - 2.0 * vorticity.Omega(p)); }
  /// Exact H_pp = H_p^3 omega(p).
  double Hpp_at(double p) const {
    const double hp = Hp_at(p);
    return hp * hp * hp * vorticity.omega(p);
  }
  double H_at(double p) const { return H_(p); }

  /// U(Y): Newton inversion of the quintic Hermite interpolant of H.
  double U_at(double Y) const {
    if (Y <= 0.0) return 0.0;
    if (Y >= d) return 1.0;
    auto it = std::upper_bound(H_samples.begin(), H_samples.end(), Y);
    const std::size_t i = std::min<std::size_t>(
        static_cast<std::size_t>(it - H_samples.begin()) - 1, H_samples.size() - 2);
    double p = grid_p[i] + (Y - H_samples[i]) / (H_samples[i + 1] - H_samples[i]) *
                               (grid_p[i + 1] - grid_p[i]);
    for (int k = 0; k < 8; ++k) {
      const double step = (H_.evaluate_on(i, p) - Y) / Hp_at(p);
      p -= step;
      if (std::abs(step) < 1e-16) break;
    }
    return std::clamp(p, 0.0, 1.0);
  }
  /// U'(Y) = sqrt(s^2 - 2 Omega(U)).
  double U_prime_at(double Y) const { return 1.0 / Hp_at(U_at(Y)); }
  double U_second_at(double Y) const { return -vorticity.omega(U_at(Y)); }

  /// int_0^d dY / U'(Y)^2 by Simpson on grid_Y; an independent route to 1/F^2.
  double inverse_froude_squared_physical() const {
    std::vector<double> g(grid_Y.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double up = s * s - 2.0 * vorticity.Omega(U_samples[i]);
      g[i] = 1.0 / up;
    }
    return numerics::simpson(grid_Y, g);
  }

  void build_interpolant() {
    std::vector<double> hpp(grid_p.size());
    for (std::size_t i = 0; i < grid_p.size(); ++i) hpp[i] = Hpp_at(grid_p[i]);
    H_ = numerics::QuinticHermite(grid_p, H_samples, Hp_samples, std::move(hpp));
  }

 private:
  numerics::QuinticHermite H_;
};

/// Builds the uniform stream with U'(0) = s on n-point grids in p and Y.
inline StreamSolution stream_profile(const VorticitySpec& vort, double s, std::size_t n = 2001,
                                     const Tolerances& tol = {}) {
  detail::check_radicand(vort, s, tol);
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "grid size must be at least 3");
  StreamSolution sol;
  sol.vorticity = vort;
  sol.tol = tol;
  sol.s = s;
  sol.grid_p = numerics::uniform_grid(0.0, 1.0, n);
  sol.H_samples.assign(n, 0.0);
  sol.Hp_samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.Hp_samples[i] = sol.Hp_at(sol.grid_p[i]);
  auto hp = [&sol](double p) { return sol.Hp_at(p); };
  for (std::size_t i = 1; i < n; ++i) {
    sol.H_samples[i] = sol.H_samples[i - 1] + numerics::integrate(hp, sol.grid_p[i - 1],
                                                                  sol.grid_p[i], 1e-15, 1e-14);
  }
  sol.build_interpolant();
  sol.d = sol.H_samples.back();
  sol.kappa = std::sqrt(s * s - 2.0 * vort.Omega(1.0));
  sol.R = 0.5 * s * s + sol.d - vort.Omega(1.0);
  sol.froude = 1.0 / std::sqrt(inverse_froude_squared(vort, s, tol));
  sol.grid_Y = numerics::uniform_grid(0.0, sol.d, n);
  sol.U_samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.U_samples[i] = sol.U_at(sol.grid_Y[i]);
  sol.U_samples.front() = 0.0;
  sol.U_samples.back() = 1.0;
  return sol;
}

enum class FroudeRegime { SubcriticalWavesExist, Supercritical };

inline const char* to_string(FroudeRegime r) {
  return r == FroudeRegime::SubcriticalWavesExist ? "SubcriticalWavesExist" : "Supercritical";
}

/// Small Stokes waves bifurcate iff int_0^d dY/U'^2 > 1, i.e. F < 1. F = 1 is
/// classified as supercritical.
inline FroudeRegime froude_condition(const StreamSolution& sol) {
  const double inv_f2 = 1.0 / (sol.froude * sol.froude);
  return inv_f2 > 1.0 + 1e-12 ? FroudeRegime::SubcriticalWavesExist : FroudeRegime::Supercritical;
}

}  // namespace stokes_branch
