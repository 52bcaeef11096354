#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "loopqed/quadrature.hpp"

using namespace loopqed;

TEST(GaussLegendre, ExactForPolynomials) {
  for (int n : {2, 5, 16, 32}) {
    const auto rule = quad::gauss_legendre(n);
    ASSERT_EQ(rule.nodes.size(), static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(s, exact, 1e-14) << n << " " << p;
    }
  }
}

TEST(Adaptive, ScalarAndVector) {
  const auto r = quad::integrate_scalar([](double x) { return std::exp(x); }, 0.0, 1.0, 0.0, 1e-14);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value[0], std::numbers::e - 1.0, 1e-14);

  // Oscillatory integrand with a smooth companion channel.
  auto f = [](double x) { return std::array<double, 2>{std::cos(50.0 * x), x * x}; };
  const auto v = quad::integrate<2>(f, 0.0, 2.0, 1e-14, 1e-12, 2000, 2);
  EXPECT_TRUE(v.converged);
  EXPECT_NEAR(v.value[0], std::sin(100.0) / 50.0, 1e-12);
  EXPECT_NEAR(v.value[1], 8.0 / 3.0, 1e-13);
  EXPECT_LE(v.error, 1e-11);
}

TEST(Adaptive, ErrorEstimateIsHonest) {
  // sqrt has an endpoint singularity; the estimate must bound the true error.
  const auto r = quad::integrate_scalar([](double x) { return std::sqrt(x); }, 0.0, 1.0, 0.0, 1e-10);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(std::abs(r.value[0] - 2.0 / 3.0), std::max(r.error, 1e-15));
}

TEST(Adaptive, ReportsNonConvergence) {
  auto f = [](double x) { return std::sin(1.0 / (x + 1e-4)); };
  const auto r = quad::integrate_scalar(f, 0.0, 1.0, 0.0, 1e-14, 3);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.error, 0.0);
}

TEST(Adaptive, InitialPanelsAndMagnitudeChannel) {
  quad::AdaptiveOptions opt;
  opt.initial_panels = 8;
  auto f = [](double x) { return std::array<double, 1>{std::sin(x)}; };
  const auto r = quad::integrate<1>(f, 0.0, std::numbers::pi, 0.0, 1e-14, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.intervals, 8u);
  EXPECT_NEAR(r.value[0], 2.0, 1e-14);
}

TEST(Adaptive, SemiInfinite) {
  const auto r = quad::integrate_to_infinity([](double t) { return std::exp(-t); }, 1.0, 0.0, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value[0], std::exp(-1.0), 1e-12);
}
