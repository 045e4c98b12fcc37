#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stokes_branch/hodograph_expansion.hpp"
#include "stokes_branch/irrotational.hpp"

namespace sb = stokes_branch;
namespace ir = stokes_branch::irrotational;

namespace {

// omega = 0 stream whose scaled frequency tau* d equals tau.
sb::StreamSolution irrotational_stream(double tau, std::size_t n = 2001) {
  const double d = std::cbrt(ir::nu(tau));
  return sb::stream_profile(sb::VorticitySpec({0.0}), 1.0 / d, n);
}

struct Case {
  std::vector<double> omega;
  double s;
};

const std::vector<Case> kCases{{{0.2}, 0.9987}, {{0.5, -1.0}, 0.8951}, {{-1.0}, 0.4243},
                               {{0.3, 0.0, -2.0}, 0.7817}};

}  // namespace

TEST(KernelMode, IrrotationalClosedForm) {
  const double s = 0.8;
  const auto st = sb::stream_profile(sb::VorticitySpec({0.0}), s);
  const auto disp = sb::tau_star(st);
  const auto k = sb::kernel_mode(st, disp);
  const double t = disp.tau_star;
  EXPECT_EQ(k.alpha.front(), 0.0);
  for (std::size_t i = 0; i < k.p.size(); i += 40) {
    const double p = k.p[i];
    EXPECT_NEAR(k.alpha[i], std::sinh(t * p / s) / (s * std::sinh(t * st.d)), 1e-10);
    EXPECT_NEAR(k.dalpha[i], t / s * std::cosh(t * p / s) / (s * std::sinh(t * st.d)), 1e-9);
  }
}

TEST(KernelMode, SolvesHomogeneousProblem) {
  for (const auto& c : kCases) {
    const auto st = sb::stream_profile(sb::VorticitySpec(c.omega), c.s);
    const auto disp = sb::tau_star(st);
    const auto k = sb::kernel_mode(st, disp);
    const auto r = sb::kernel_residual(st, k);
    EXPECT_LT(r.interior, 1e-7);
    EXPECT_LT(r.boundary, 1e-7);
    EXPECT_EQ(k.alpha.front(), 0.0);
    EXPECT_NEAR(k.alpha.back(), 1.0 / st.kappa, 1e-12);
  }
}

TEST(RhsModes, ReconstructionMatchesPointwiseForcing) {
  using D1 = oracle::Dual<double>;
  const Case c = kCases[1];
  const auto st = sb::stream_profile(sb::VorticitySpec(c.omega), c.s);
  const auto disp = sb::tau_star(st);
  const auto k = sb::kernel_mode(st, disp);
  const auto m = sb::rhs_modes(k, st);
  const double tau = k.tau_star;
  const double s = st.s;

  // J2 and I2 built from first derivatives of v0 = alpha0(p) cos(tau q), with
  // alpha0 the kernel interpolant evaluated on dual numbers.
  auto eval = [&](std::size_t seg, auto q, auto p) {
    using T = decltype(q);
    using oracle::cos;
    using std::cos;
    using oracle::sqrt;
    using std::sqrt;
    using DT = oracle::Dual<T>;
    auto v0 = [&](DT qq, DT pp) { return k.interpolant.evaluate_on(seg, pp) * cos(qq * tau); };
    const T v0q = v0(DT(q, T(1.0)), DT(p, T(0.0))).d;
    const T v0p = v0(DT(q, T(0.0)), DT(p, T(1.0))).d;
    T Om = T(0.0);
    for (std::size_t j = c.omega.size(); j-- > 0;) Om = (Om + c.omega[j] / (j + 1.0)) * p;
    const T hp = T(1.0) / sqrt(T(s * s) - Om * 2.0);
    const T hp2 = hp * hp;
    const T J2 = v0q * v0q / (hp2 * 2.0) + v0p * v0p * 1.5 / (hp2 * hp2);
    const T I2 = v0q * v0p / hp2;
    return std::pair<T, T>{J2, I2};
  };

  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(1, k.p.size() - 2);
  std::uniform_real_distribution<double> qd(-disp.lambda0 / 2, disp.lambda0 / 2);
  for (int n = 0; n < 64; ++n) {
    const std::size_t i = pick(rng);
    const double q = qd(rng);
    const double p = k.p[i];
    const std::size_t seg = k.interpolant.segment(p);
    const double dJ2dp = eval(seg, D1(q, 0.0), D1(p, 1.0)).first.d;
    const double dI2dq = eval(seg, D1(q, 1.0), D1(p, 0.0)).second.d;
    const double direct = -dJ2dp - dI2dq;
    const double rebuilt = m.r0[i] + m.r2[i] * std::cos(2.0 * tau * q);
    EXPECT_NEAR(rebuilt, direct, 1e-10 * std::max(1.0, std::abs(direct)));
    // Boundary data: -J2 at p = 1.
    const double J2top = eval(k.p.size() - 2, 0.0 + q, 1.0).first;
    EXPECT_NEAR(m.g0 + m.g2 * std::cos(2.0 * tau * q), -J2top, 1e-12);
  }
}

TEST(RhsModes, ZeroKernelGivesZeroForcing) {
  const auto st = sb::stream_profile(sb::VorticitySpec({0.5, -1.0}), 0.9);
  sb::KernelMode k;
  k.tau_star = 1.3;
  k.p = st.grid_p;
  k.alpha.assign(k.p.size(), 0.0);
  k.dalpha = k.alpha;
  k.ddalpha = k.alpha;
  const auto m = sb::rhs_modes(k, st);
  for (std::size_t i = 0; i < k.p.size(); ++i) {
    EXPECT_EQ(m.r0[i], 0.0);
    EXPECT_EQ(m.r2[i], 0.0);
  }
  EXPECT_EQ(m.g0, 0.0);
  EXPECT_EQ(m.g2, 0.0);
}

// Closed-form streamline displacement for omega = 0 in depth-scaled variables:
// v1 = d (-alpha1 p + tau a^2 sinh(2 tau p)/4) + d (-alpha2 + tau a^2/4) sinh(2 tau p) cos(2 tau q).
TEST(SecondOrderModes, IrrotationalClosedForm) {
  for (double tau : {0.8, 1.6, 2.4}) {
    const auto st = irrotational_stream(tau);
    const auto disp = sb::tau_star(st);
    const auto k = sb::kernel_mode(st, disp);
    const auto f = sb::rhs_modes(k, st);
    const auto ms = sb::second_order_modes(st, k, f);
    const auto c = ir::second_order_coeffs(tau);
    const double d = st.d;
    const double A = 0.25 * tau * c.a * c.a;
    for (std::size_t i = 0; i < ms.p_grid.size(); i += 25) {
      const double p = ms.p_grid[i];
      const double sh = std::sinh(2.0 * tau * p);
      EXPECT_NEAR(ms.alpha1[i], d * (-c.alpha1 * p + A * sh), 1e-9) << tau << " " << p;
      EXPECT_NEAR(ms.beta1[i], d * (-c.alpha2 + A) * sh, 1e-9) << tau << " " << p;
    }
    // The same closed forms satisfy the strong-form mode equations with
    // H_p = d: -u''/d^3 + k^2 u/d = r, -u'(1)/d^3 + u(1) = g. The
    // double-frequency mode is harmonic, so it is driven by the surface only.
    const double d3 = d * d * d;
    for (std::size_t i = 1; i + 1 < ms.p_grid.size(); i += 97) {
      const double sh = std::sinh(2.0 * tau * ms.p_grid[i]);
      EXPECT_NEAR(-d * A * 4.0 * tau * tau * sh / d3, f.r0[i], 1e-9);
      EXPECT_NEAR(f.r2[i], 0.0, 1e-9);
    }
    const double ch = std::cosh(2.0 * tau), sh1 = std::sinh(2.0 * tau);
    EXPECT_NEAR(-d * (-c.alpha1 + 2.0 * tau * A * ch) / d3 + d * (-c.alpha1 + A * sh1), f.g0, 1e-9);
    EXPECT_NEAR(-d * (-c.alpha2 + A) * 2.0 * tau * ch / d3 + d * (-c.alpha2 + A) * sh1, f.g2, 1e-9);
  }
}

TEST(SecondOrderModes, ResidualsAndOrthogonality) {
  for (const auto& c : kCases) {
    const auto st = sb::stream_profile(sb::VorticitySpec(c.omega), c.s);
    const auto disp = sb::tau_star(st);
    const auto k = sb::kernel_mode(st, disp);
    const auto f = sb::rhs_modes(k, st);
    const auto ms = sb::second_order_modes(st, k, f);
    const auto r = sb::mode_residual(st, ms, f);
    EXPECT_LT(r.interior_mean, 1e-7);
    EXPECT_LT(r.interior_double, 1e-7);
    EXPECT_LT(r.boundary_mean, 1e-9);
    EXPECT_LT(r.boundary_double, 1e-9);
    EXPECT_LT(std::abs(sb::detail::v1_v0_projection(ms)), 1e-9);
  }
}

TEST(Lambda2, AgreesWithClosedFormOnGrid) {
  for (int i = 0; i <= 10; ++i) {
    const double tau = 0.5 + 0.25 * i;
    const auto st = irrotational_stream(tau);
    const auto pipe = sb::second_order_analysis(st);
    EXPECT_NEAR(pipe.dispersion.tau_star * st.d, tau, 1e-10);
    const double ref = ir::lambda2_irrotational(tau);
    EXPECT_NEAR(pipe.result.lambda2, ref, 1e-5 * std::abs(ref)) << tau;
  }
}

TEST(Lambda2, SignAtTauOnePointFive) {
  const auto r = sb::second_order_analysis(irrotational_stream(1.5)).result;
  EXPECT_LT(r.lambda2, 0.0);
  EXPECT_GT(r.Lambda2, 0.0);
}

TEST(Lambda2, AnalyticAndNumericQIntegrationAgree) {
  for (const auto& c : kCases) {
    const auto st = sb::stream_profile(sb::VorticitySpec(c.omega), c.s);
    const auto pipe = sb::second_order_analysis(st);
    const auto a = sb::solvability_terms(pipe.modes, st);
    const auto b = sb::solvability_terms_numeric_q(pipe.modes, st, 32);
    EXPECT_NEAR(sb::lambda2_from_terms(a), sb::lambda2_from_terms(b),
                1e-9 * std::max(1.0, std::abs(sb::lambda2_from_terms(a))));
  }
}

TEST(Lambda2, IndependentOfKernelComponentInV1) {
  const auto st = sb::stream_profile(sb::VorticitySpec(kCases[2].omega), kCases[2].s);
  auto pipe = sb::second_order_analysis(st);
  const double base = sb::lambda2_from_terms(sb::solvability_terms_numeric_q(pipe.modes, st));
  for (double c : {-3.0, 0.5, 10.0}) {
    pipe.modes.kernel_component = c;
    const double shifted = sb::lambda2_from_terms(sb::solvability_terms_numeric_q(pipe.modes, st));
    EXPECT_NEAR(shifted, base, 1e-10 * std::max(1.0, std::abs(base)));
  }
}

TEST(Lambda2, DegenerateLeadingCoefficient) {
  sb::SolvabilityTerms t;
  t.I1 = 0.0;
  try {
    sb::lambda2_from_terms(t);
    FAIL();
  } catch (const sb::Error& e) {
    EXPECT_EQ(e.kind(), sb::ErrorKind::DegenerateLeadingCoefficient);
  }
}

TEST(Lambda2, ConvergesUnderGridRefinement) {
  const Case c = kCases[1];
  const auto w = sb::VorticitySpec(c.omega);
  std::vector<double> l;
  for (std::size_t n : {101u, 201u, 401u, 3201u}) {
    l.push_back(sb::second_order_analysis(sb::stream_profile(w, c.s, n)).result.lambda2);
  }
  const double e1 = std::abs(l[0] - l[3]);
  const double e2 = std::abs(l[1] - l[3]);
  const double e3 = std::abs(l[2] - l[3]);
  // Halving h must cut the error by at least 2^3 (or reach roundoff).
  EXPECT_TRUE(e2 < e1 / 8.0 || e2 < 1e-11) << e1 << " " << e2;
  EXPECT_TRUE(e3 < e2 / 8.0 || e3 < 1e-11) << e2 << " " << e3;
}

TEST(Mu2, RelationAndYForm) {
  for (const auto& c : kCases) {
    const auto st = sb::stream_profile(sb::VorticitySpec(c.omega), c.s);
    const auto r = sb::second_order_analysis(st).result;
    EXPECT_GT(r.I1, 0.0);
    EXPECT_GT(r.I2, 0.0);
    EXPECT_LT(r.relation_residual, 1e-7);
    EXPECT_LT(r.y_form_residual, 1e-7);
    EXPECT_NEAR(-4.0 * r.lambda2 * r.I1, r.mu2 * r.I2, 1e-7 * std::abs(4.0 * r.lambda2 * r.I1));
    EXPECT_EQ(r.mu2 > 0.0, r.lambda2 < 0.0);
    EXPECT_EQ(r.mu2 > 0.0, r.Lambda2 > 0.0);
    EXPECT_NEAR(r.Lambda2, -r.lambda2 * r.lambda0, 1e-14 * std::abs(r.Lambda2));
  }
}

TEST(Mu2, ZeroLambda2GivesZero) {
  const auto st = irrotational_stream(1.2);
  const auto pipe = sb::second_order_analysis(st);
  EXPECT_EQ(sb::mu2_from_lambda2(0.0, pipe.modes, st, pipe.dispersion).mu2, 0.0);
}

TEST(Mu2, EigenvalueSolvabilityAgrees) {
  for (const auto& c : kCases) {
    const auto r =
        sb::second_order_analysis(sb::stream_profile(sb::VorticitySpec(c.omega), c.s)).result;
    EXPECT_NEAR(r.mu2_eigen, r.mu2, 1e-5 * std::abs(r.mu2));
  }
  for (double tau : {0.9, 2.3}) {
    const auto r = sb::second_order_analysis(irrotational_stream(tau)).result;
    EXPECT_NEAR(r.mu2_eigen, r.mu2, 1e-5 * std::abs(r.mu2));
  }
}

TEST(Mu2, PositiveBelowFroudeThreshold) {
  const double theta = ir::theta_from_froude(1.2);
  const auto st = sb::stream_profile(sb::VorticitySpec({0.0}), 1.0 / std::cbrt(theta));
  EXPECT_GT(sb::second_order_analysis(st).result.mu2, 0.0);
}
