#pragma once

// Closed-form chain for omega = 0. Lengths are scaled by the depth d+ of the
// subcritical stream, so the problem carries the single parameter
// theta = d+^3 and the dispersion relation reads nu(tau) = tau coth(tau) = theta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>

#include "stokes_branch/error.hpp"
#include "stokes_branch/numerics.hpp"

namespace stokes_branch::irrotational {

inline constexpr double kTauMin = 0.05;
// Lower Froude bound for the Assumption, taken from numerical solitary-wave
// computations (Longuet-Higgins and Fenton, 1974).
inline constexpr double kFroudeLow = 1.29;
inline constexpr const char* kFroudeLowSource = "Longuet-Higgins & Fenton (1974), solitary waves";

inline double nu(double tau) {
  if (std::abs(tau) < 1e-4) return 1.0 + tau * tau / 3.0 - tau * tau * tau * tau / 45.0;
  return tau / std::tanh(tau);
}

struct Depths {
  double d_minus = 0.0;
  double d_plus = 0.0;
};

/// Both roots of 1/d^2 + 2d = 2R.
inline Depths depths_from_R(double R) {
  if (!(R > 1.5)) {
    throw Error(ErrorKind::NoTwoRoots,
                "1/d^2 + 2d = 2R has two roots only for R > 3/2, got R = " + std::to_string(R));
  }
  auto g = [R](double d) { return 1.0 / (d * d) + 2.0 * d - 2.0 * R; };
  Depths out;
  // g decreases on (0, 1) from +inf and increases on (1, inf) to +inf.
  out.d_minus = numerics::find_root(g, 1.0 / std::sqrt(2.0 * R), 1.0, 1e-15);
  out.d_plus = numerics::find_root(g, 1.0, R, 1e-15);
  return out;
}

/// d+/d- = (1 + sqrt(1 + 8 d-^3)) / (4 d-^3).
inline double conjugate_ratio(double d_minus) {
  const double c = d_minus * d_minus * d_minus;
  return (1.0 + std::sqrt(1.0 + 8.0 * c)) / (4.0 * c);
}

inline double theta_from_froude(double F) {
  if (!(F > 0.0)) throw Error(ErrorKind::InvalidArgument, "Froude number must be positive");
  const double b = (F + std::sqrt(F * F + 8.0)) / 4.0;
  return b * b * b * F;
}

inline double froude_from_theta(double theta) {
  if (!(theta >= 1.0)) throw Error(ErrorKind::InvalidArgument, "theta must be >= 1");
  if (theta == 1.0) return 1.0;
  // theta(F) >= F for F >= 1.
  return numerics::find_root([theta](double F) { return theta_from_froude(F) - theta; }, 1.0,
                             theta, 1e-14);
}

inline double tau_from_theta(double theta) {
  if (!(theta > 1.0)) {
    throw Error(ErrorKind::NoRoot,
                "tau coth(tau) = theta has no positive root for theta = " + std::to_string(theta));
  }
  // nu(tau) > tau and nu(tau) < 1 + tau, so the root lies in (theta - 1, theta).
  return numerics::find_root([theta](double t) { return nu(t) - theta; },
                             std::max(0.0, theta - 1.0) * 0.999, theta, 1e-15);
}

struct IrrotationalChain {
  double theta = 0.0;
  double tau_star = 0.0;
  double a = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double f_value = 0.0;
  double lambda2 = 0.0;
  double froude = 0.0;
};

/// theta, a and the second-order coefficients for frequency tau.
inline IrrotationalChain second_order_coeffs(double tau) {
  if (!(tau >= kTauMin)) {
    throw Error(ErrorKind::InvalidArgument,
                "tau = " + std::to_string(tau) + " is below the minimum " + std::to_string(kTauMin));
  }
  IrrotationalChain c;
  c.tau_star = tau;
  c.theta = nu(tau);
  const double th = c.theta;
  const double n2 = nu(2.0 * tau);
  c.a = -1.0 / std::sinh(tau);
  c.beta1 = -(th + 0.5 * (th * th - tau * tau)) / (2.0 * (th - 1.0));
  c.alpha1 = 0.5 * th - c.beta1;
  c.beta2 = -(th * n2 + 0.5 * (th * th - 3.0 * tau * tau)) / (2.0 * th - 2.0 * n2);
  c.alpha2 = (0.5 * th - c.beta2) / std::sinh(2.0 * tau);
  return c;
}

inline double f_of(const IrrotationalChain& c) {
  const double t = c.tau_star;
  const double sh = std::sinh(t);
  return -(t * t / (sh * sh)) * (c.beta1 + 0.5 * c.beta2) + 2.0 * c.theta * c.alpha1 +
         c.alpha2 * (2.0 * c.theta * t * std::cosh(2.0 * t) - t * t * std::sinh(2.0 * t)) -
         c.theta * t * t;
}

inline double f_eval(double tau) { return f_of(second_order_coeffs(tau)); }

/// Solvability of the t^3 problem: lambda2 (sinh 2tau - 2tau) tau = -2 sinh^2(tau) f(tau).
inline double lambda2_irrotational(double tau) {
  const double sh = std::sinh(tau);
  return -2.0 * sh * sh * f_eval(tau) / (tau * (std::sinh(2.0 * tau) - 2.0 * tau));
}

inline IrrotationalChain chain(double tau) {
  auto c = second_order_coeffs(tau);
  c.f_value = f_of(c);
  c.lambda2 = lambda2_irrotational(tau);
  c.froude = froude_from_theta(c.theta);
  return c;
}

/// Residuals of the four original coefficient equations and the two
/// eliminated forms; all vanish for consistent coefficients.
struct CoefficientResiduals {
  double kinematic1 = 0.0;
  double kinematic2 = 0.0;
  double bernoulli1 = 0.0;
  double bernoulli2 = 0.0;
  double eliminated1 = 0.0;
  double eliminated2 = 0.0;

  double max() const {
    return std::max({std::abs(kinematic1), std::abs(kinematic2), std::abs(bernoulli1),
                     std::abs(bernoulli2), std::abs(eliminated1), std::abs(eliminated2)});
  }
};

inline CoefficientResiduals coefficient_residuals(const IrrotationalChain& c) {
  const double t = c.tau_star;
  const double th = c.theta;
  const double n2 = nu(2.0 * t);
  CoefficientResiduals r;
  r.kinematic1 = c.beta1 + c.alpha1 - 0.5 * th;
  r.kinematic2 = c.beta2 + c.alpha2 * std::sinh(2.0 * t) - 0.5 * th;
  r.bernoulli1 = 2.0 * c.alpha1 + 2.0 * th * c.beta1 + 0.5 * (th * th - t * t);
  r.bernoulli2 = 4.0 * t * c.alpha2 * std::cosh(2.0 * t) + 2.0 * th * c.beta2 +
                 0.5 * (th * th - 3.0 * t * t);
  r.eliminated1 = 2.0 * (th - 1.0) * c.beta1 + th + 0.5 * (th * th - t * t);
  r.eliminated2 = (2.0 * th - 2.0 * n2) * c.beta2 + th * n2 + 0.5 * (th * th - 3.0 * t * t);
  return r;
}

/// Root tau0 of f, bracketed by a scan of [0.5, 3].
inline double tau0_root(std::size_t n_scan = 512) {
  const auto br = numerics::sign_change_brackets(f_eval, 0.5, 3.0, n_scan);
  if (br.empty()) throw Error(ErrorKind::NoBracket, "f has no sign change on [0.5, 3]");
  return numerics::find_root(f_eval, br.front().first, br.front().second, 1e-13);
}

inline double froude0() { return froude_from_theta(nu(tau0_root())); }

struct AssumptionWindow {
  double F_low = kFroudeLow;
  double F_high = 0.0;
  const char* F_low_source = kFroudeLowSource;
  // The analytic bound F < sqrt(2) is weaker than F_high.
  double analytic_bound = std::numbers::sqrt2;
  bool analytic_bound_sufficient = false;

  bool contains(double F) const { return F > F_low && F < F_high; }
};

inline AssumptionWindow assumption_window() {
  AssumptionWindow w;
  w.F_high = froude0();
  w.analytic_bound_sufficient = w.analytic_bound <= w.F_high;
  return w;
}

struct ExpansionResidual {
  double laplace = 0.0;
  double bernoulli = 0.0;
  double kinematic = 0.0;
};

/// Max residuals of the free-boundary problem
///   (lambda^2 d_s^2 + d_y^2) psi = 0 in -1 < y < eta(s),
///   psi(s, eta) = 1,  psi_y^2 + lambda^2 psi_s^2 + 2 theta eta = 1 on y = eta
/// for the two-term expansion, sampled over one period.
inline ExpansionResidual expansion_residual(double tau, double t, std::size_t ns = 128,
                                            std::size_t ny = 33) {
  if (!(t >= 0.0 && t <= 0.1)) throw Error(ErrorKind::InvalidArgument, "t must lie in [0, 0.1]");
  const auto c = second_order_coeffs(tau);
  const double l2 = lambda2_irrotational(tau);
  const double lam = 1.0 + l2 * t * t;
  const double lam2 = lam * lam;
  const double th = c.theta;

  struct Derivs {
    double psi, ps, py, pss, pyy;
  };
  auto field = [&](double s, double y) {
    const double cs = std::cos(tau * s), sn = std::sin(tau * s);
    const double c2 = std::cos(2.0 * tau * s), s2 = std::sin(2.0 * tau * s);
    const double sh1 = std::sinh(tau * (y + 1.0)), ch1 = std::cosh(tau * (y + 1.0));
    const double sh2 = std::sinh(2.0 * tau * (y + 1.0)), ch2 = std::cosh(2.0 * tau * (y + 1.0));
    const double p1 = c.a * cs * sh1;
    const double p1s = -tau * c.a * sn * sh1;
    const double p1y = tau * c.a * cs * ch1;
    const double p1ss = -tau * tau * p1;
    const double p1yy = tau * tau * p1;
    const double p2 = c.alpha1 * (y + 1.0) + c.alpha2 * c2 * sh2;
    const double p2s = -2.0 * tau * c.alpha2 * s2 * sh2;
    const double p2y = c.alpha1 + 2.0 * tau * c.alpha2 * c2 * ch2;
    const double p2ss = -4.0 * tau * tau * c.alpha2 * c2 * sh2;
    const double p2yy = 4.0 * tau * tau * c.alpha2 * c2 * sh2;
    return Derivs{1.0 + y + t * p1 + t * t * p2, t * p1s + t * t * p2s,
                  1.0 + t * p1y + t * t * p2y, t * p1ss + t * t * p2ss, t * p1yy + t * t * p2yy};
  };

  ExpansionResidual r;
  const double L = 2.0 * std::numbers::pi / tau;
  for (std::size_t i = 0; i < ns; ++i) {
    const double s = L * static_cast<double>(i) / static_cast<double>(ns);
    const double eta =
        t * std::cos(tau * s) + t * t * (c.beta1 + c.beta2 * std::cos(2.0 * tau * s));
    const auto top = field(s, eta);
    r.kinematic = std::max(r.kinematic, std::abs(top.psi - 1.0));
    r.bernoulli = std::max(
        r.bernoulli, std::abs(top.py * top.py + lam2 * top.ps * top.ps + 2.0 * th * eta - 1.0));
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = -1.0 + (eta + 1.0) * static_cast<double>(j) / static_cast<double>(ny - 1);
      const auto in = field(s, y);
      r.laplace = std::max(r.laplace, std::abs(lam2 * in.pss + in.pyy));
    }
  }
  return r;
}

}  // namespace stokes_branch::irrotational
