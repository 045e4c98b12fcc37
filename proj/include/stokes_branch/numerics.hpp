#pragma once

// Numerical plumbing shared by the solvers: adaptive quadrature, bracketed
// root finding, 1-D minimization, Dormand-Prince integration on output grids,
// composite Simpson sums and Hermite interpolation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "stokes_branch/error.hpp"

namespace stokes_branch {

/// Tolerances threaded through every solver. A StreamSolution carries the
/// set it was built with so downstream stages stay consistent.
struct Tolerances {
  double quad_abs = 1e-10;
  double quad_rel = 1e-10;
  double ode_rel = 1e-12;
  double ode_abs = 1e-12;
  double root = 1e-12;
  // Minimum admissible s^2 - 2 max Omega.
  double radicand = 1e-8;
  // |normalized shooting determinant| below this is treated as resonance.
  double resonance = 1e-8;
};

namespace numerics {

inline std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least two points");
  std::vector<double> x(n);
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + h * static_cast<double>(i);
  x.back() = b;
  return x;
}

namespace detail {

// Boost's error estimate never drops below a few ulps in absolute terms, so
// its own adaptive driver over-refines integrals of small magnitude. Local
// bisection that accepts an estimate at that floor avoids this.
template <class F>
double gk_adaptive(F& f, double a, double b, double fa_tol, double rel_tol, int depth,
                   double& err_total) {
  double err = 0.0;
  double l1 = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err, &l1);
  const double floor =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, l1 / std::abs(b - a));
  if (err <= std::max({fa_tol, rel_tol * l1, floor}) || depth == 0) {
    err_total += err;
    return v;
  }
  const double m = 0.5 * (a + b);
  return gk_adaptive(f, a, m, 0.5 * fa_tol, rel_tol, depth - 1, err_total) +
         gk_adaptive(f, m, b, 0.5 * fa_tol, rel_tol, depth - 1, err_total);
}

}  // namespace detail

/// Adaptive 15-point Gauss-Kronrod quadrature of f over [a, b].
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10, double rel_tol = 1e-10) {
  if (a == b) return 0.0;
  double err = 0.0;
  double value = detail::gk_adaptive(f, a, b, abs_tol, rel_tol, 30, err);
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::NumericalFailure, "quadrature produced a non-finite value");
  }
  const double target = std::max({abs_tol, rel_tol * std::abs(value),
                                  1e3 * std::numeric_limits<double>::epsilon()});
  if (err > 1e4 * target) {
    throw Error(ErrorKind::NumericalFailure,
                "quadrature did not converge (error estimate " + std::to_string(err) + ")");
  }
  return value;
}

/// Tanh-sinh quadrature over [a, b], for integrands with sharp peaks or
/// integrable singularities at the endpoints.
template <class F>
double integrate_endpoint_peaked(F&& f, double a, double b, double rel_tol = 1e-12) {
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  double err = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(f, a, b, rel_tol, &err, &l1);
  if (!std::isfinite(value) || err > 1e3 * std::max(rel_tol * l1, 1e-300)) {
    throw Error(ErrorKind::NumericalFailure,
                "endpoint quadrature did not converge (error estimate " + std::to_string(err) +
                    ")");
  }
  return value;
}

/// Bracketed root of f on [lo, hi] by TOMS 748 (Brent-class, superlinear).
template <class F>
double find_root(F&& f, double lo, double hi, double x_tol = 1e-12, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(ErrorKind::NoBracket, "no sign change on [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "]");
  }
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto done = [x_tol](double a, double b) { return std::abs(b - a) <= x_tol; };
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  return 0.5 * (r.first + r.second);
}

/// Scans [lo, hi] on n points and returns the brackets of every sign change.
template <class F>
std::vector<std::pair<double, double>> sign_change_brackets(F&& f, double lo, double hi,
                                                            std::size_t n) {
  std::vector<std::pair<double, double>> out;
  const auto xs = uniform_grid(lo, hi, n);
  double prev = f(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double cur = f(xs[i]);
    if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) {
      out.emplace_back(xs[i - 1], xs[i]);
    }
    prev = cur;
  }
  return out;
}

/// Minimizer of a unimodal f on [lo, hi] (Brent's parabolic/golden search).
template <class F>
std::pair<double, double> minimize(F&& f, double lo, double hi) {
  std::uintmax_t iters = 500;
  return boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits / 2,
                                               iters);
}

/// Composite Simpson sum of uniformly spaced samples; an even sample count
/// closes with a 3/8 panel.
inline double simpson(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (y[0] + y[1]);
  if (n == 3) return h / 3.0 * (y[0] + 4.0 * y[1] + y[2]);
  std::size_t m = (n % 2 == 1) ? n : n - 3;
  double s = y[0] + y[m - 1];
  for (std::size_t i = 1; i + 1 < m; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
  double total = h / 3.0 * s;
  if (m != n) {
    const std::size_t k = m - 1;
    total += 3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]);
  }
  return total;
}

inline double simpson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "sample size mismatch");
  if (x.size() < 2) return 0.0;
  return simpson(y, (x.back() - x.front()) / static_cast<double>(x.size() - 1));
}

/// Integrates y' = rhs(x, y) with adaptive Dormand-Prince 5(4) and returns
/// the state at every grid point (grid[0] is the initial point).
template <std::size_t N, class Rhs>
std::vector<std::array<double, N>> integrate_on_grid(Rhs&& rhs, const std::array<double, N>& y0,
                                                     std::span<const double> grid,
                                                     double rel_tol, double abs_tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, N>;
  std::vector<State> out;
  out.reserve(grid.size());
  if (grid.empty()) return out;
  if (grid.size() == 1) {
    out.push_back(y0);
    return out;
  }
  auto system = [&rhs](const State& y, State& dy, double x) { dy = rhs(x, y); };
  State y = y0;
  const double dt0 = std::min(1e-3, std::abs(grid[1] - grid[0]));
  auto stepper = odeint::make_dense_output(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, system, y, grid.begin(), grid.end(), dt0,
                          [&out](const State& s, double) { out.push_back(s); });
  for (const auto& s : out) {
    for (double v : s) {
      if (!std::isfinite(v)) throw Error(ErrorKind::NumericalFailure, "ODE state diverged");
    }
  }
  return out;
}

/// Piecewise quintic Hermite interpolant from values, first and second
/// derivatives on a strictly increasing grid. Evaluation is templated on the
/// scalar so it can be run on dual numbers.
class QuinticHermite {
 public:
  QuinticHermite() = default;
  QuinticHermite(std::vector<double> x, std::vector<double> f, std::vector<double> df,
                 std::vector<double> ddf)
      : x_(std::move(x)), f_(std::move(f)), df_(std::move(df)), ddf_(std::move(ddf)) {
    if (x_.size() < 2 || f_.size() != x_.size() || df_.size() != x_.size() ||
        ddf_.size() != x_.size()) {
      throw Error(ErrorKind::InvalidArgument, "inconsistent Hermite data");
    }
  }

  std::size_t segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
  }

  template <class T>
  T evaluate_on(std::size_t i, const T& x) const {
    const double h = x_[i + 1] - x_[i];
    const T t = (x - x_[i]) / h;
    const T t2 = t * t;
    const T t3 = t2 * t;
    const T t4 = t3 * t;
    const T t5 = t4 * t;
    const T h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const T h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const T h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    const T h3 = 0.5 * t3 - t4 + 0.5 * t5;
    const T h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    const T h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    return f_[i] * h0 + h * df_[i] * h1 + h * h * ddf_[i] * h2 + h * h * ddf_[i + 1] * h3 +
           h * df_[i + 1] * h4 + f_[i + 1] * h5;
  }

  double operator()(double x) const { return evaluate_on(segment(x), x); }

  double derivative(double x) const {
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    const double d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    const double d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    const double d2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
    const double d3 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
    const double d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    const double d5 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    return (f_[i] * d0 + h * df_[i] * d1 + h * h * ddf_[i] * d2 + h * h * ddf_[i + 1] * d3 +
            h * df_[i + 1] * d4 + f_[i + 1] * d5) /
           h;
  }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return f_; }

 private:
  std::vector<double> x_, f_, df_, ddf_;
};

}  // namespace numerics
}  // namespace stokes_branch
