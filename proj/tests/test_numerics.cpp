#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "stokes_branch/numerics.hpp"

namespace sb = stokes_branch;
namespace nm = stokes_branch::numerics;

TEST(Quadrature, SmoothIntegrand) {
  EXPECT_NEAR(nm::integrate([](double x) { return std::exp(x); }, 0.0, 1.0), std::exp(1.0) - 1.0,
              1e-13);
}

TEST(Quadrature, SmallIntervalsTerminateQuickly) {
  int calls = 0;
  const double v = nm::integrate(
      [&](double) {
        ++calls;
        return 4.2;
      },
      0.0, 5e-4, 1e-15, 1e-14);
  EXPECT_NEAR(v, 2.1e-3, 1e-17);
  EXPECT_LT(calls, 100);
}

TEST(Quadrature, EndpointPeak) {
  const double eps = 1e-6;
  const double v = nm::integrate_endpoint_peaked(
      [eps](double x) { return 1.0 / std::pow(eps + x, 1.5); }, 0.0, 1.0, 1e-12);
  const double exact = 2.0 / std::sqrt(eps) - 2.0 / std::sqrt(1.0 + eps);
  EXPECT_NEAR(v / exact, 1.0, 1e-10);
}

TEST(RootFinding, BracketedRoot) {
  EXPECT_NEAR(nm::find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0),
              0.7390851332151607, 1e-12);
}

TEST(RootFinding, NoBracketThrows) {
  try {
    nm::find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0);
    FAIL();
  } catch (const sb::Error& e) {
    EXPECT_EQ(e.kind(), sb::ErrorKind::NoBracket);
  }
}

TEST(RootFinding, SignChangeScan) {
  const auto br = nm::sign_change_brackets([](double x) { return std::sin(x); }, 0.5, 10.0, 200);
  ASSERT_EQ(br.size(), 3u);
  EXPECT_LT(br[0].first, std::numbers::pi);
  EXPECT_GT(br[0].second, std::numbers::pi);
}

TEST(Simpson, ExactForCubicsOddAndEvenCounts) {
  for (std::size_t n : {5u, 6u, 101u, 2000u}) {
    const auto x = nm::uniform_grid(0.0, 2.0, n);
    std::vector<double> y;
    for (double t : x) y.push_back(t * t * t - t + 1.0);
    EXPECT_NEAR(nm::simpson(x, y), 4.0 - 2.0 + 2.0, 1e-12) << n;
  }
}

TEST(Ode, HarmonicOscillator) {
  const auto grid = nm::uniform_grid(0.0, 3.0, 31);
  const auto out = nm::integrate_on_grid<2>(
      [](double, const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -y[0]}; },
      {0.0, 1.0}, grid, 1e-12, 1e-12);
  ASSERT_EQ(out.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(out[i][0], std::sin(grid[i]), 1e-10);
}

TEST(Hermite, ReproducesQuinticsAndDerivatives) {
  auto f = [](double x) { return 1.0 - 2.0 * x + x * x * x - 0.5 * std::pow(x, 5); };
  auto df = [](double x) { return -2.0 + 3.0 * x * x - 2.5 * std::pow(x, 4); };
  auto ddf = [](double x) { return 6.0 * x - 10.0 * x * x * x; };
  const auto x = nm::uniform_grid(0.0, 1.5, 7);
  std::vector<double> a, b, c;
  for (double t : x) {
    a.push_back(f(t));
    b.push_back(df(t));
    c.push_back(ddf(t));
  }
  const nm::QuinticHermite h(x, a, b, c);
  for (double t : {0.03, 0.4, 0.77, 1.2, 1.5}) {
    EXPECT_NEAR(h(t), f(t), 1e-13);
    EXPECT_NEAR(h.derivative(t), df(t), 1e-12);
  }
}
