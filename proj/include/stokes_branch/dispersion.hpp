#pragma once

// Dispersion relation of the uniform stream: gamma(Y; tau) solves
// gamma'' + omega'(U) gamma - tau^2 gamma = 0, gamma(0) = 0, gamma(d) = 1 and
// sigma(tau) = kappa gamma'(d; tau) - 1/kappa + omega(1). Small Stokes waves
// of wavelength 2 pi / tau* bifurcate at the positive root tau* of sigma.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "stokes_branch/error.hpp"
#include "stokes_branch/linear_bvp.hpp"
#include "stokes_branch/numerics.hpp"
#include "stokes_branch/vorticity_stream.hpp"

namespace stokes_branch {

struct GammaProfile {
  double tau = 0.0;
  std::vector<double> Y;
  std::vector<double> gamma;
  std::vector<double> dgamma;
};

inline RobinBVP gamma_problem(const StreamSolution& stream, double tau) {
  const double t = std::abs(tau);
  RobinBVP bvp;
  bvp.length = stream.d;
  bvp.form = BvpForm::Physical;
  bvp.coeff_q = [&stream, t](double Y) {
    return stream.vorticity.omega_prime(stream.U_at(Y)) - t * t;
  };
  bvp.top = TopCondition::Dirichlet;
  bvp.robin_g = 1.0;
  return bvp;
}

/// gamma(Y; |tau|) on n uniform nodes of [0, d] (n = 0: the stream's Y grid size).
inline GammaProfile gamma_solve(const StreamSolution& stream, double tau, std::size_t n = 0) {
  const auto sol = solve(gamma_problem(stream, tau), n == 0 ? stream.grid_Y.size() : n,
                         stream.tol);
  return {std::abs(tau), sol.x, sol.u, sol.du};
}

/// gamma'(d; tau) read off the integrator state at the surface.
inline double gamma_prime_at_surface(const StreamSolution& stream, double tau) {
  return solve(gamma_problem(stream, tau), 2, stream.tol).du.back();
}

/// rho0 = kappa^-2 - omega(1)/kappa.
inline double rho0(const StreamSolution& stream) {
  return 1.0 / (stream.kappa * stream.kappa) - stream.vorticity.omega(1.0) / stream.kappa;
}

/// (1 + U'(d) U''(d)) / U'(d)^2 with U', U'' from one-sided differences of
/// the sampled profile.
inline double rho0_from_profile(const StreamSolution& stream) {
  const auto& u = stream.U_samples;
  const std::size_t n = u.size();
  if (n < 6) throw Error(ErrorKind::InvalidArgument, "profile too coarse");
  const double h = stream.grid_Y[1] - stream.grid_Y[0];
  const double u0 = u[n - 1], u1 = u[n - 2], u2 = u[n - 3], u3 = u[n - 4], u4 = u[n - 5],
               u5 = u[n - 6];
  const double up = (25.0 * u0 - 48.0 * u1 + 36.0 * u2 - 16.0 * u3 + 3.0 * u4) / (12.0 * h);
  const double upp =
      (45.0 * u0 - 154.0 * u1 + 214.0 * u2 - 156.0 * u3 + 61.0 * u4 - 10.0 * u5) / (12.0 * h * h);
  return (1.0 + up * upp) / (up * up);
}

inline double sigma(const StreamSolution& stream, double tau) {
  return stream.kappa * gamma_prime_at_surface(stream, tau) - 1.0 / stream.kappa +
         stream.vorticity.omega(1.0);
}

/// Equivalent form kappa gamma'(d) - kappa rho0.
inline double sigma_rho0_form(const StreamSolution& stream, double tau) {
  return stream.kappa * gamma_prime_at_surface(stream, tau) - stream.kappa * rho0(stream);
}

struct DispersionResult {
  std::vector<double> tau_grid;
  std::vector<double> sigma_values;
  double tau_star = 0.0;
  double lambda0 = 0.0;
  GammaProfile gamma_star;
  double sigma0 = 0.0;
  double froude = 0.0;
  // Diagnostics of the sampled sigma curve.
  bool monotone_on_grid = true;
  std::size_t sign_changes = 0;
};

/// The unique positive root tau* of sigma, bracketed from the linear growth
/// sigma ~ kappa tau and refined to 1e-12. Throws NoRoot when sigma(0) >= 0.
inline DispersionResult tau_star(const StreamSolution& stream, std::size_t n_scan = 64) {
  DispersionResult out;
  out.froude = stream.froude;
  out.sigma0 = sigma(stream, 0.0);
  if (out.sigma0 >= -1e-10) {
    throw Error(ErrorKind::NoRoot, "sigma(0) = " + std::to_string(out.sigma0) +
                                       " >= 0; Froude number F = " +
                                       std::to_string(stream.froude) + " is not subcritical");
  }
  auto sig = [&stream](double t) { return sigma(stream, t); };
  double hi = std::max(4.0, 4.0 * (std::abs(out.sigma0) + 1.0) / stream.kappa);
  for (int k = 0; sig(hi) <= 0.0; ++k) {
    if (k > 60) throw Error(ErrorKind::NoRoot, "sigma stays negative");
    hi *= 2.0;
  }
  out.tau_star = numerics::find_root(sig, 0.0, hi, stream.tol.root);
  out.lambda0 = 2.0 * std::numbers::pi / out.tau_star;

  const double top = std::max(hi, 2.0 * out.tau_star);
  out.tau_grid = numerics::uniform_grid(0.0, top, std::max<std::size_t>(n_scan, 2));
  out.sigma_values.resize(out.tau_grid.size());
  for (std::size_t i = 0; i < out.tau_grid.size(); ++i) {
    out.sigma_values[i] = i == 0 ? out.sigma0 : sig(out.tau_grid[i]);
  }
  for (std::size_t i = 1; i < out.sigma_values.size(); ++i) {
    if (!(out.sigma_values[i] > out.sigma_values[i - 1])) out.monotone_on_grid = false;
    if ((out.sigma_values[i - 1] < 0.0) != (out.sigma_values[i] < 0.0)) ++out.sign_changes;
  }
  out.gamma_star = gamma_solve(stream, out.tau_star);
  return out;
}

}  // namespace stokes_branch
