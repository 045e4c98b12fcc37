#pragma once

// Linear second-order two-point boundary value problems on [0, L] with
// u(0) = 0 and a Robin (or Dirichlet) condition at x = L, in two forms:
//
//   physical:   (v' - G)' + q(x) v = f(x),            (v' - G) - rho v = g at L
//   hodograph: -(u'/H_p^3 - G)' + tau^2 u / H_p = F,  -(u'/H_p^3 - G) + rho u = g at L
//
// G is an optional divergence-form forcing; with G = 0 these are the
// uniform-stream problem v'' + omega'(U) v - tau^2 v = f and its hodograph
// image. The primary solver is shooting by superposition with adaptive
// Dormand-Prince; Chebyshev collocation is an independent cross-check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stokes_branch/error.hpp"
#include "stokes_branch/numerics.hpp"
#include "stokes_branch/vorticity_stream.hpp"

namespace stokes_branch {

using ScalarFn = std::function<double(double)>;

enum class BvpForm { Physical, Hodograph };
enum class TopCondition { Robin, Dirichlet };

struct RobinBVP {
  double length = 1.0;
  BvpForm form = BvpForm::Physical;
  ScalarFn coeff_q;    // physical form: q(x)
  ScalarFn weight_hp;  // hodograph form: H_p(x) > 0
  double tau = 0.0;    // hodograph form only
  ScalarFn rhs;        // f or F; empty means zero
  ScalarFn flux_rhs;   // G; empty means zero
  TopCondition top = TopCondition::Robin;
  double robin_rho = 0.0;
  double robin_g = 0.0;
};

/// Grid samples of the solution, its derivative and its flux
/// (v' - G, or u'/H_p^3 - G).
struct BvpSolution {
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> du;
  std::vector<double> flux;
  double determinant = 0.0;
};

namespace detail {

inline double eval_or_zero(const ScalarFn& f, double x) { return f ? f(x) : 0.0; }

inline void validate(const RobinBVP& bvp) {
  if (!(bvp.length > 0.0) || !std::isfinite(bvp.length)) {
    throw Error(ErrorKind::InvalidArgument, "interval length must be positive");
  }
  if (bvp.form == BvpForm::Physical && !bvp.coeff_q) {
    throw Error(ErrorKind::InvalidArgument, "physical form needs coeff_q");
  }
  if (bvp.form == BvpForm::Hodograph) {
    if (!bvp.weight_hp) throw Error(ErrorKind::InvalidArgument, "hodograph form needs weight_hp");
    if (!(bvp.tau >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be non-negative");
  }
}

// Coefficients of the top functional B(u, flux) = cu * u + cf * flux.
inline std::pair<double, double> top_functional(const RobinBVP& bvp) {
  if (bvp.top == TopCondition::Dirichlet) return {1.0, 0.0};
  if (bvp.form == BvpForm::Physical) return {-bvp.robin_rho, 1.0};
  return {bvp.robin_rho, -1.0};
}

// Derivative of the first-order system (u, flux); `forced` toggles f and G.
inline std::array<double, 2> first_order_rhs(const RobinBVP& bvp, double x, double u, double flux,
                                             bool forced) {
  const double G = forced ? eval_or_zero(bvp.flux_rhs, x) : 0.0;
  const double f = forced ? eval_or_zero(bvp.rhs, x) : 0.0;
  if (bvp.form == BvpForm::Physical) return {flux + G, f - bvp.coeff_q(x) * u};
  const double hp = bvp.weight_hp(x);
  return {hp * hp * hp * (flux + G), bvp.tau * bvp.tau * u / hp - f};
}

inline double derivative_from_flux(const RobinBVP& bvp, double x, double flux) {
  const double G = eval_or_zero(bvp.flux_rhs, x);
  if (bvp.form == BvpForm::Physical) return flux + G;
  const double hp = bvp.weight_hp(x);
  return hp * hp * hp * (flux + G);
}

struct ShootingRun {
  std::vector<double> x;
  std::vector<std::array<double, 4>> states;  // particular (u, flux), homogeneous (u, flux)
  double determinant = 0.0;
  double raw_determinant = 0.0;
};

inline ShootingRun shoot(const RobinBVP& bvp, std::size_t n, const Tolerances& tol) {
  validate(bvp);
  ShootingRun run;
  run.x = numerics::uniform_grid(0.0, bvp.length, std::max<std::size_t>(n, 2));
  auto rhs = [&bvp](double x, const std::array<double, 4>& y) {
    const auto p = first_order_rhs(bvp, x, y[0], y[1], true);
    const auto h = first_order_rhs(bvp, x, y[2], y[3], false);
    return std::array<double, 4>{p[0], p[1], h[0], h[1]};
  };
  run.states = numerics::integrate_on_grid<4>(rhs, {0.0, 0.0, 0.0, 1.0}, run.x, tol.ode_rel,
                                              tol.ode_abs);
  const auto [cu, cf] = top_functional(bvp);
  const auto& end = run.states.back();
  run.raw_determinant = cu * end[2] + cf * end[3];
  double scale = 0.0;
  for (const auto& s : run.states) scale = std::max({scale, std::abs(s[2]), std::abs(s[3])});
  run.determinant = run.raw_determinant / (std::max(std::abs(cu), std::abs(cf)) * scale);
  return run;
}

}  // namespace detail

/// Normalized shooting determinant B(y_h(L)) / max|y_h|; it vanishes exactly
/// when the homogeneous problem has a nontrivial solution.
inline double shooting_determinant(const RobinBVP& bvp, const Tolerances& tol = {}) {
  return detail::shoot(bvp, 2, tol).determinant;
}

/// Unique solution sampled on n uniform nodes of [0, L].
inline BvpSolution solve(const RobinBVP& bvp, std::size_t n, const Tolerances& tol = {}) {
  const auto run = detail::shoot(bvp, n, tol);
  if (std::abs(run.determinant) < tol.resonance) {
    throw Error(ErrorKind::NearResonance,
                "homogeneous problem is (nearly) singular: normalized determinant " +
                    std::to_string(run.determinant));
  }
  const auto [cu, cf] = detail::top_functional(bvp);
  const auto& end = run.states.back();
  const double k = (bvp.robin_g - (cu * end[0] + cf * end[1])) / run.raw_determinant;
  BvpSolution out;
  out.x = run.x;
  out.determinant = run.determinant;
  const std::size_t m = run.x.size();
  out.u.resize(m);
  out.flux.resize(m);
  out.du.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& s = run.states[i];
    out.u[i] = s[0] + k * s[2];
    out.flux[i] = s[1] + k * s[3];
    out.du[i] = detail::derivative_from_flux(bvp, run.x[i], out.flux[i]);
  }
  return out;
}

namespace detail {

struct Chebyshev {
  std::vector<double> x;  // ascending nodes on [0, L]
  Eigen::MatrixXd D;      // d/dx on those nodes
};

inline Chebyshev chebyshev(std::size_t N, double L) {
  const auto n = static_cast<Eigen::Index>(N);
  std::vector<double> t(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    t[j] = std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(N));
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 1, n + 1);
  auto c = [N](std::size_t j) { return (j == 0 || j == N) ? 2.0 : 1.0; };
  for (std::size_t i = 0; i <= N; ++i) {
    for (std::size_t j = 0; j <= N; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          c(i) / c(j) * sign / (t[i] - t[j]);
    }
  }
  // Negative-sum trick for the diagonal.
  for (Eigen::Index i = 0; i <= n; ++i) D(i, i) = -D.row(i).sum() + D(i, i);
  Chebyshev out;
  out.x.resize(N + 1);
  for (std::size_t j = 0; j <= N; ++j) out.x[j] = 0.5 * L * (1.0 - t[j]);
  out.D = (-2.0 / L) * D;
  return out;
}

inline double barycentric(const std::vector<double>& nodes, const Eigen::VectorXd& values,
                          double x) {
  const std::size_t N = nodes.size() - 1;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j <= N; ++j) {
    const double diff = x - nodes[j];
    const auto jj = static_cast<Eigen::Index>(j);
    if (diff == 0.0) return values(jj);
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == N) w *= 0.5;
    num += w / diff * values(jj);
    den += w / diff;
  }
  return num / den;
}

}  // namespace detail

/// Chebyshev spectral collocation on N+1 nodes, resampled on n uniform nodes.
inline BvpSolution solve_collocation(const RobinBVP& bvp, std::size_t n, std::size_t N = 64) {
  detail::validate(bvp);
  const auto cheb = detail::chebyshev(N, bvp.length);
  const auto m = static_cast<Eigen::Index>(N + 1);
  const Eigen::MatrixXd& D = cheb.D;
  Eigen::VectorXd G(m), f(m), P(m), Q(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = cheb.x[static_cast<std::size_t>(i)];
    G(i) = detail::eval_or_zero(bvp.flux_rhs, x);
    f(i) = detail::eval_or_zero(bvp.rhs, x);
    if (bvp.form == BvpForm::Physical) {
      P(i) = 1.0;
      Q(i) = bvp.coeff_q(x);
    } else {
      const double hp = bvp.weight_hp(x);
      P(i) = 1.0 / (hp * hp * hp);
      Q(i) = bvp.tau * bvp.tau / hp;
    }
  }
  const Eigen::VectorXd DG = D * G;
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd b(m);
  if (bvp.form == BvpForm::Physical) {
    A = D * D;
    A.diagonal() += Q;
    b = f + DG;
  } else {
    A = -D * P.asDiagonal() * D;
    A.diagonal() += Q;
    b = f - DG;
  }
  A.row(0).setZero();
  A(0, 0) = 1.0;
  b(0) = 0.0;
  const Eigen::Index last = m - 1;
  A.row(last).setZero();
  if (bvp.top == TopCondition::Dirichlet) {
    A(last, last) = 1.0;
    b(last) = bvp.robin_g;
  } else if (bvp.form == BvpForm::Physical) {
    A.row(last) = D.row(last);
    A(last, last) -= bvp.robin_rho;
    b(last) = bvp.robin_g + G(last);
  } else {
    A.row(last) = -P(last) * D.row(last);
    A(last, last) += bvp.robin_rho;
    b(last) = bvp.robin_g - G(last);
  }
  const Eigen::VectorXd u = A.fullPivLu().solve(b);
  const Eigen::VectorXd du = D * u;
  Eigen::VectorXd flux(m);
  for (Eigen::Index i = 0; i < m; ++i) flux(i) = P(i) * du(i) - G(i);

  BvpSolution out;
  out.x = numerics::uniform_grid(0.0, bvp.length, std::max<std::size_t>(n, 2));
  out.u.resize(out.x.size());
  out.du.resize(out.x.size());
  out.flux.resize(out.x.size());
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    out.u[i] = detail::barycentric(cheb.x, u, out.x[i]);
    out.du[i] = detail::barycentric(cheb.x, du, out.x[i]);
    out.flux[i] = detail::barycentric(cheb.x, flux, out.x[i]);
  }
  return out;
}

/// Hodograph problem on [0, 1] for the given stream:
///   -(u_p/H_p^3 - G)_p + tau^2 u/H_p = F,  u(0) = 0,  -(u_p/H_p^3 - G) + u = c at p = 1.
inline BvpSolution solve_mode(const StreamSolution& stream, double tau, ScalarFn rhs,
                              double robin_g, ScalarFn flux_rhs = {}, std::size_t n = 0) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be non-negative");
  RobinBVP bvp;
  bvp.length = 1.0;
  bvp.form = BvpForm::Hodograph;
  bvp.weight_hp = [&stream](double p) { return stream.Hp_at(p); };
  bvp.tau = tau;
  bvp.rhs = std::move(rhs);
  bvp.flux_rhs = std::move(flux_rhs);
  bvp.top = TopCondition::Robin;
  bvp.robin_rho = 1.0;
  bvp.robin_g = robin_g;
  return solve(bvp, n == 0 ? stream.grid_p.size() : n, stream.tol);
}

/// Symmetric form a(u, w) = int (u_p w_p / H_p^3 + tau^2 u w / H_p) dp - u(1) w(1)
/// of the hodograph operator, by Simpson on the solutions' common grid.
inline double hodograph_bilinear(const StreamSolution& stream, double tau, const BvpSolution& u,
                                 const BvpSolution& w) {
  if (u.x.size() != w.x.size()) throw Error(ErrorKind::InvalidArgument, "grid mismatch");
  std::vector<double> g(u.x.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double hp = stream.Hp_at(u.x[i]);
    g[i] = u.du[i] * w.du[i] / (hp * hp * hp) + tau * tau * u.u[i] * w.u[i] / hp;
  }
  return numerics::simpson(u.x, g) - u.u.back() * w.u.back();
}

}  // namespace stokes_branch
