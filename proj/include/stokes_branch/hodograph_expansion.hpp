#pragma once

// Small-amplitude expansion of a Stokes branch in hodograph variables (q, p):
// h = H(p) + t v, v = v0 + t v1 + ..., lambda = Lambda0/Lambda = 1 + lambda2 t^2.
//
//   v0 = alpha0(p) cos(tau* q),  alpha0 = gamma(H(p); tau*) H_p
//   v1 = alpha1(p) + beta1(p) cos(2 tau* q)
//
// lambda2 comes from the solvability condition of the t^3 problem (tested
// against v0), and mu2, the t^2 coefficient of the second eigenvalue of the
// Frechet derivative, from -4 lambda2 I1 = mu2 I2 with
// I1 = int_Omega v0q^2 / H_p and I2 = int_Omega v0^2 over one period.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "stokes_branch/dispersion.hpp"
#include "stokes_branch/error.hpp"
#include "stokes_branch/linear_bvp.hpp"
#include "stokes_branch/numerics.hpp"
#include "stokes_branch/vorticity_stream.hpp"

namespace stokes_branch {

/// alpha0 with its first two p-derivatives on the stream's p grid.
struct KernelMode {
  double tau_star = 0.0;
  std::vector<double> p;
  std::vector<double> alpha;
  std::vector<double> dalpha;
  std::vector<double> ddalpha;
  numerics::QuinticHermite interpolant;

  double alpha_at(double x) const { return interpolant(x); }
  double dalpha_at(double x) const { return interpolant.derivative(x); }
};

/// alpha0(p) = gamma(H(p); tau*) H_p(p), with gamma interpolated from the
/// surface-normalized profile of the dispersion solve.
inline KernelMode kernel_mode(const StreamSolution& stream, const DispersionResult& disp) {
  const auto& g = disp.gamma_star;
  const double tau = disp.tau_star;
  if (g.Y.size() != stream.grid_Y.size()) {
    throw Error(ErrorKind::InvalidArgument, "gamma profile must live on the stream's Y grid");
  }
  std::vector<double> ddg(g.Y.size());
  for (std::size_t i = 0; i < g.Y.size(); ++i) {
    ddg[i] = (tau * tau - stream.vorticity.omega_prime(stream.U_samples[i])) * g.gamma[i];
  }
  const numerics::QuinticHermite gamma_interp(g.Y, g.gamma, g.dgamma, ddg);

  KernelMode k;
  k.tau_star = tau;
  k.p = stream.grid_p;
  const std::size_t n = k.p.size();
  k.alpha.resize(n);
  k.dalpha.resize(n);
  k.ddalpha.resize(n);
  const auto& w = stream.vorticity;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = k.p[i];
    const double Y = std::min(stream.H_samples[i], stream.d);
    const double hp = stream.Hp_at(p);
    const double hpp = stream.Hpp_at(p);
    const double hppp = 3.0 * hp * hp * hpp * w.omega(p) + hp * hp * hp * w.omega_prime(p);
    const double gm = i == 0 ? 0.0 : (i + 1 == n ? 1.0 : gamma_interp(Y));
    const double dg = i + 1 == n ? g.dgamma.back() : gamma_interp.derivative(Y);
    const double ddgm = (tau * tau - w.omega_prime(p)) * gm;
    k.alpha[i] = gm * hp;
    k.dalpha[i] = dg * hp * hp + gm * hpp;
    k.ddalpha[i] = ddgm * hp * hp * hp + 3.0 * dg * hp * hpp + gm * hppp;
  }
  k.interpolant = numerics::QuinticHermite(k.p, k.alpha, k.dalpha, k.ddalpha);
  return k;
}

/// Pointwise residual -(a'/H_p^3)' + tau^2 a/H_p of the tau* homogeneous
/// hodograph equation, and the surface residual -a'(1)/H_p^3 + a(1).
struct KernelResidual {
  double interior = 0.0;
  double boundary = 0.0;
};

inline KernelResidual kernel_residual(const StreamSolution& stream, const KernelMode& k) {
  KernelResidual r;
  const double t2 = k.tau_star * k.tau_star;
  for (std::size_t i = 0; i < k.p.size(); ++i) {
    const double hp = stream.Hp_at(k.p[i]);
    const double hpp = stream.Hpp_at(k.p[i]);
    const double hp3 = hp * hp * hp;
    const double res =
        -k.ddalpha[i] / hp3 + 3.0 * k.dalpha[i] * hpp / (hp3 * hp) + t2 * k.alpha[i] / hp;
    r.interior = std::max(r.interior, std::abs(res));
  }
  const double hp1 = stream.Hp_at(1.0);
  r.boundary = std::abs(-k.dalpha.back() / (hp1 * hp1 * hp1) + k.alpha.back());
  return r;
}

/// Fourier-mode decomposition of the forcing of the v1 problem
///   A0 v1 + (J2(v0))_p + (I2(v0))_q = 0,  B0 v1 + J2(v0) = 0 at p = 1,
/// with J2 = v0q^2/(2 H_p^2) + 3 v0p^2/(2 H_p^4), I2 = v0q v0p / H_p^2.
/// J2 = G0 + G2 cos(2 tau q) and -(I2)_q = F2 cos(2 tau q), so the modes solve
/// the hodograph problem with divergence-form forcing G and interior forcing F.
struct ModeForcing {
  double tau_star = 0.0;
  std::vector<double> p;
  std::vector<double> G0, G2, F2;
  // Strong-form interior forcings r0 = -G0', r2 = -G2' + F2 and the
  // boundary constants g0 = -G0(1), g2 = -G2(1) of -u_p/H_p^3 + u = g.
  std::vector<double> r0, r2;
  double g0 = 0.0;
  double g2 = 0.0;
};

namespace detail {

struct ForcingPoint {
  double G0, G2, F2, dG0, dG2;
};

inline ForcingPoint forcing_at(double tau, double a, double da, double dda, double hp,
                               double hpp) {
  const double t2 = tau * tau;
  const double hp2 = hp * hp;
  const double hp4 = hp2 * hp2;
  const double A = a * a / hp2;     // alpha0^2 / H_p^2
  const double B = da * da / hp4;   // alpha0'^2 / H_p^4
  const double dA = 2.0 * a * da / hp2 - 2.0 * a * a * hpp / (hp2 * hp);
  const double dB = 2.0 * da * dda / hp4 - 4.0 * da * da * hpp / (hp4 * hp);
  ForcingPoint f;
  f.G0 = 0.25 * t2 * A + 0.75 * B;
  f.G2 = -0.25 * t2 * A + 0.75 * B;
  f.F2 = t2 * a * da / hp2;
  f.dG0 = 0.25 * t2 * dA + 0.75 * dB;
  f.dG2 = -0.25 * t2 * dA + 0.75 * dB;
  return f;
}

}  // namespace detail

inline ModeForcing rhs_modes(const KernelMode& k, const StreamSolution& stream) {
  ModeForcing m;
  m.tau_star = k.tau_star;
  m.p = k.p;
  const std::size_t n = k.p.size();
  m.G0.resize(n);
  m.G2.resize(n);
  m.F2.resize(n);
  m.r0.resize(n);
  m.r2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = detail::forcing_at(k.tau_star, k.alpha[i], k.dalpha[i], k.ddalpha[i],
                                      stream.Hp_at(k.p[i]), stream.Hpp_at(k.p[i]));
    m.G0[i] = f.G0;
    m.G2[i] = f.G2;
    m.F2[i] = f.F2;
    m.r0[i] = -f.dG0;
    m.r2[i] = -f.dG2 + f.F2;
  }
  m.g0 = -m.G0.back();
  m.g2 = -m.G2.back();
  return m;
}

/// v0 and v1 profiles. v1 = alpha1 + beta1 cos(2 tau* q) + kernel_component * v0.
struct ModeSet {
  std::vector<double> p_grid;
  std::vector<double> alpha0, dalpha0;
  std::vector<double> alpha1, dalpha1, flux1;
  std::vector<double> beta1, dbeta1, fluxb1;
  double tau_star = 0.0;
  double lambda0 = 0.0;
  // L2(Omega) projection of the raw v1 on v0 (removed), and the v0 multiple
  // that remains in v1 (zero after normalization).
  double projection_removed = 0.0;
  double kernel_component = 0.0;
};

namespace detail {

// Mean over one period of f(q) sampled at m equispaced q (exact for
// trigonometric polynomials of degree < m).
template <class F>
double period_mean(F&& f, double tau, std::size_t m = 32) {
  const double L = 2.0 * std::numbers::pi / tau;
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) acc += f(-0.5 * L + L * static_cast<double>(j) / m);
  return acc / static_cast<double>(m);
}

inline double v1_v0_projection(const ModeSet& ms, std::size_t m = 32) {
  const double tau = ms.tau_star;
  std::vector<double> num(ms.p_grid.size()), den(ms.p_grid.size());
  for (std::size_t i = 0; i < ms.p_grid.size(); ++i) {
    num[i] = period_mean(
        [&](double q) {
          const double v0 = ms.alpha0[i] * std::cos(tau * q);
          const double v1 = ms.alpha1[i] + ms.beta1[i] * std::cos(2.0 * tau * q) +
                            ms.kernel_component * v0;
          return v1 * v0;
        },
        tau, m);
    den[i] = 0.5 * ms.alpha0[i] * ms.alpha0[i];
  }
  return numerics::simpson(ms.p_grid, num) / numerics::simpson(ms.p_grid, den);
}

}  // namespace detail

inline ModeSet second_order_modes(const StreamSolution& stream, const KernelMode& k,
                                  const ModeForcing& forcing) {
  const double tau = k.tau_star;
  auto point = [&stream, &k, tau](double p) {
    return detail::forcing_at(tau, k.alpha_at(p), k.dalpha_at(p), 0.0, stream.Hp_at(p),
                              stream.Hpp_at(p));
  };
  const std::size_t n = stream.grid_p.size();
  // Divergence form: flux u_p/H_p^3 - G and -(flux) + u = 0 at p = 1, which
  // is -u_p/H_p^3 + u = -G(1).
  const auto mean = solve_mode(
      stream, 0.0, {}, 0.0, [point](double p) { return point(p).G0; }, n);
  const auto dbl = solve_mode(
      stream, 2.0 * tau, [point](double p) { return point(p).F2; }, 0.0,
      [point](double p) { return point(p).G2; }, n);

  ModeSet ms;
  ms.p_grid = stream.grid_p;
  ms.alpha0 = k.alpha;
  ms.dalpha0 = k.dalpha;
  ms.alpha1 = mean.u;
  ms.dalpha1 = mean.du;
  ms.flux1 = mean.flux;
  ms.beta1 = dbl.u;
  ms.dbeta1 = dbl.du;
  ms.fluxb1 = dbl.flux;
  ms.tau_star = tau;
  ms.lambda0 = 2.0 * std::numbers::pi / tau;
  ms.projection_removed = detail::v1_v0_projection(ms);
  ms.kernel_component = -ms.projection_removed;
  (void)forcing;
  return ms;
}

inline ModeSet second_order_modes(const StreamSolution& stream, const DispersionResult& disp) {
  const auto k = kernel_mode(stream, disp);
  return second_order_modes(stream, k, rhs_modes(k, stream));
}

/// Max interior residual of both mode equations (flux form, 5-point central
/// differences of the flux samples) and the surface residuals.
struct ModeResidual {
  double interior_mean = 0.0;
  double interior_double = 0.0;
  double boundary_mean = 0.0;
  double boundary_double = 0.0;
};

inline ModeResidual mode_residual(const StreamSolution& stream, const ModeSet& ms,
                                  const ModeForcing& f) {
  ModeResidual r;
  const std::size_t n = ms.p_grid.size();
  const double h = ms.p_grid[1] - ms.p_grid[0];
  const double t2 = 4.0 * ms.tau_star * ms.tau_star;
  auto d1 = [h](const std::vector<double>& y, std::size_t i) {
    return (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
  };
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double hp = stream.Hp_at(ms.p_grid[i]);
    // -(flux)' + k^2 u / H_p = F  in each mode.
    r.interior_mean = std::max(r.interior_mean, std::abs(-d1(ms.flux1, i)));
    r.interior_double =
        std::max(r.interior_double, std::abs(-d1(ms.fluxb1, i) + t2 * ms.beta1[i] / hp - f.F2[i]));
  }
  const double hp1 = stream.Hp_at(1.0);
  const double hp13 = hp1 * hp1 * hp1;
  r.boundary_mean = std::abs(-ms.dalpha1.back() / hp13 + ms.alpha1.back() - f.g0);
  r.boundary_double = std::abs(-ms.dbeta1.back() / hp13 + ms.beta1.back() - f.g2);
  return r;
}

/// The three integrals of the lambda2 solvability condition
///   2 lambda2 I1 - coupling + cubic = 0,
/// coupling = int [(v0q v1q/H_p^2 + 3 v0p v1p/H_p^4) v0p + (v0q v1p + v1q v0p) v0q / H_p^2],
/// cubic    = int [(2 v0p^3/H_p^5 + v0p v0q^2/H_p^3) v0p + v0p^2 v0q^2 / H_p^3].
struct SolvabilityTerms {
  double I1 = 0.0;
  double coupling = 0.0;
  double cubic = 0.0;
};

/// q-integrals reduced in closed form by trigonometric orthogonality.
inline SolvabilityTerms solvability_terms(const ModeSet& ms, const StreamSolution& stream) {
  const double tau = ms.tau_star;
  const double t2 = tau * tau;
  const double L = ms.lambda0;
  const std::size_t n = ms.p_grid.size();
  std::vector<double> i1(n), cpl(n), cub(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hp = stream.Hp_at(ms.p_grid[i]);
    const double hp2 = hp * hp;
    const double hp3 = hp2 * hp;
    const double hp4 = hp2 * hp2;
    const double a = ms.alpha0[i], da = ms.dalpha0[i];
    i1[i] = a * a / hp;
    cpl[i] = t2 * a * da * ms.beta1[i] / hp2 +
             (0.5 * ms.dalpha1[i] + 0.25 * ms.dbeta1[i]) * 3.0 * da * da / hp4 +
             (0.5 * ms.dalpha1[i] - 0.25 * ms.dbeta1[i]) * t2 * a * a / hp2;
    cub[i] = 0.75 * da * da * da * da / (hp4 * hp) + 0.25 * t2 * a * a * da * da / hp3;
  }
  SolvabilityTerms s;
  s.I1 = 0.5 * L * t2 * numerics::simpson(ms.p_grid, i1);
  s.coupling = L * numerics::simpson(ms.p_grid, cpl);
  s.cubic = L * numerics::simpson(ms.p_grid, cub);
  return s;
}

/// Same integrals with the q-direction done by an m-point periodic trapezoid
/// rule on the assembled fields v0, v1.
inline SolvabilityTerms solvability_terms_numeric_q(const ModeSet& ms, const StreamSolution& stream,
                                                    std::size_t m = 32) {
  const double tau = ms.tau_star;
  const double L = ms.lambda0;
  const double c = ms.kernel_component;
  const std::size_t n = ms.p_grid.size();
  std::vector<double> i1(n), cpl(n), cub(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hp = stream.Hp_at(ms.p_grid[i]);
    const double hp2 = hp * hp;
    const double hp3 = hp2 * hp;
    const double hp4 = hp2 * hp2;
    const double hp5 = hp4 * hp;
    const double a = ms.alpha0[i], da = ms.dalpha0[i];
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) {
      const double q = -0.5 * L + L * static_cast<double>(j) / static_cast<double>(m);
      const double cs = std::cos(tau * q), sn = std::sin(tau * q);
      const double c2 = std::cos(2.0 * tau * q), s2 = std::sin(2.0 * tau * q);
      const double v0q = -tau * a * sn;
      const double v0p = da * cs;
      const double v1q = -2.0 * tau * ms.beta1[i] * s2 + c * v0q;
      const double v1p = ms.dalpha1[i] + ms.dbeta1[i] * c2 + c * v0p;
      acc[0] += v0q * v0q / hp;
      acc[1] += (v0q * v1q / hp2 + 3.0 * v0p * v1p / hp4) * v0p +
                (v0q * v1p + v1q * v0p) / hp2 * v0q;
      acc[2] += (2.0 * v0p * v0p * v0p / hp5 + v0p * v0q * v0q / hp3) * v0p +
                v0p * v0p * v0q * v0q / hp3;
    }
    i1[i] = acc[0] / static_cast<double>(m);
    cpl[i] = acc[1] / static_cast<double>(m);
    cub[i] = acc[2] / static_cast<double>(m);
  }
  SolvabilityTerms s;
  s.I1 = L * numerics::simpson(ms.p_grid, i1);
  s.coupling = L * numerics::simpson(ms.p_grid, cpl);
  s.cubic = L * numerics::simpson(ms.p_grid, cub);
  return s;
}

inline double lambda2_from_terms(const SolvabilityTerms& s) {
  if (!(s.I1 > 1e-12)) {
    throw Error(ErrorKind::DegenerateLeadingCoefficient,
                "int v0q^2/H_p = " + std::to_string(s.I1) + " is not positive");
  }
  return (s.coupling - s.cubic) / (2.0 * s.I1);
}

inline double lambda2_general(const ModeSet& ms, const StreamSolution& stream) {
  return lambda2_from_terms(solvability_terms(ms, stream));
}

struct SecondOrderResult {
  double tau_star = 0.0;
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  double Lambda2 = 0.0;
  double mu2 = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  // |-4 lambda2 I1 - mu2 I2| relative to |4 lambda2 I1|.
  double relation_residual = 0.0;
  // mu2 from -4 lambda2 tau*^2 int gamma^2 dY = mu2 int gamma^2 / U' dY.
  double mu2_y_form = 0.0;
  double y_form_residual = 0.0;
  // mu2 from the eigenvalue solvability condition with U0 = v0, U1 = 2 v1.
  double mu2_eigen = 0.0;
};

inline SecondOrderResult mu2_from_lambda2(double lambda2, const ModeSet& ms,
                                          const StreamSolution& stream,
                                          const DispersionResult& disp) {
  const auto terms = solvability_terms(ms, stream);
  SecondOrderResult r;
  r.tau_star = ms.tau_star;
  r.lambda0 = ms.lambda0;
  r.lambda2 = lambda2;
  r.Lambda2 = -lambda2 * ms.lambda0;
  r.I1 = terms.I1;
  std::vector<double> sq(ms.p_grid.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = ms.alpha0[i] * ms.alpha0[i];
  r.I2 = 0.5 * ms.lambda0 * numerics::simpson(ms.p_grid, sq);
  r.mu2 = -4.0 * lambda2 * r.I1 / r.I2;
  const double scale = std::max(std::abs(4.0 * lambda2 * r.I1), 1e-300);
  r.relation_residual = std::abs(-4.0 * lambda2 * r.I1 - r.mu2 * r.I2) / scale;

  const auto& g = disp.gamma_star;
  std::vector<double> g2(g.Y.size()), g2u(g.Y.size());
  for (std::size_t i = 0; i < g.Y.size(); ++i) {
    g2[i] = g.gamma[i] * g.gamma[i];
    g2u[i] = g2[i] * stream.Hp_at(stream.U_samples[i]);
  }
  const double lhs = -4.0 * lambda2 * ms.tau_star * ms.tau_star * numerics::simpson(g.Y, g2);
  r.mu2_y_form = lhs / numerics::simpson(g.Y, g2u);
  r.y_form_residual =
      std::abs(r.mu2_y_form - r.mu2) / std::max(std::abs(r.mu2), 1e-300);

  r.mu2_eigen = (2.0 * lambda2 * terms.I1 - 3.0 * terms.coupling + 3.0 * terms.cubic) / r.I2;
  return r;
}

/// Every stage of the expansion for one stream.
struct ExpansionPipeline {
  DispersionResult dispersion;
  KernelMode kernel;
  ModeForcing forcing;
  ModeSet modes;
  SecondOrderResult result;
};

inline ExpansionPipeline second_order_analysis(const StreamSolution& stream) {
  ExpansionPipeline out;
  out.dispersion = tau_star(stream);
  out.kernel = kernel_mode(stream, out.dispersion);
  out.forcing = rhs_modes(out.kernel, stream);
  out.modes = second_order_modes(stream, out.kernel, out.forcing);
  const double l2 = lambda2_general(out.modes, stream);
  out.result = mu2_from_lambda2(l2, out.modes, stream, out.dispersion);
  return out;
}

}  // namespace stokes_branch
