#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "loopqed/constant_a.hpp"
#include "loopqed/error.hpp"

using namespace loopqed;

TEST(SingleQ, ClosedFormsAgainstReferences) {
  // L_2 references from 30-digit oscillatory quadrature.
  const std::pair<double, double> refs[] = {{0.1, 1.56856268780788950167223241692},
                                            {0.5, 0.539276923308864245474401809732},
                                            {2.0, 0.0181143459951633027144626112327},
                                            {10.0, 0.0000394351661292776565173937583922}};
  for (auto [t, v] : refs) EXPECT_NEAR(single_q_transform2(t), v, 1e-14 * std::max(1.0, v)) << t;
  EXPECT_NEAR(single_q_transform0(0.5), 0.8, 1e-16);
}

TEST(SingleQ, ClosedFormsMatchQuadrature) {
  for (double t : {0.05, 0.3, 1.0, 3.9, 4.1, 20.0}) {
    EXPECT_NEAR(single_q_transform0(t), single_q_transform_numeric(0, t), 1e-11) << t;
    const double l2 = single_q_transform2(t);
    EXPECT_NEAR(l2, single_q_transform_numeric(2, t), 1e-11 * std::max(1e-2, l2)) << t;
  }
  EXPECT_THROW(single_q_transform_numeric(0, 0.0), DomainError);
}

TEST(SingleQ, LargeTBranchIsContinuousAndDecays) {
  // L_0 ~ t^-2; for L_2 the t^-2 terms cancel and (2/5) t^-4 leads.
  EXPECT_NEAR(single_q_transform0(1e3) * 1e6, 1.0, 1e-6);
  const double below = single_q_transform2(std::nextafter(4.0, 0.0)), above = single_q_transform2(4.0 + 1e-12);
  EXPECT_NEAR(below, above, 1e-13);
  EXPECT_NEAR(single_q_transform2(1e3) * 1e12, 0.4, 1e-6);
}

TEST(Transverse, ContractionIsOnePlusCosineSquared) {
  std::mt19937_64 e(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    const Vec3 a{n(e), n(e), n(e)}, b{n(e), n(e), n(e)};
    const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    const double c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb);
    EXPECT_NEAR(transverse_contraction(a, b), 1.0 + c * c, 1e-12);
  }
  EXPECT_THROW(transverse_contraction(Vec3{0, 0, 0}, Vec3{1, 0, 0}), DomainError);
}

TEST(ConstantA, RoutesAgreeAndValueIsOneOverPi) {
  const ConstantA a = constant_A();
  EXPECT_TRUE(a.routes_agree);
  EXPECT_TRUE(std::isfinite(a.value));
  EXPECT_LE(std::abs(a.t_route.value - a.b_route.value), a.t_route.error + a.b_route.error);
  EXPECT_LE(std::abs(a.t_route_alt.value - a.b_route_alt.value), a.t_route_alt.error + a.b_route_alt.error);
  EXPECT_NEAR(a.value, 1.0 / std::numbers::pi, 1e-8);
  EXPECT_NEAR(a.t_route_alt.value, -1.0 / std::numbers::pi, 1e-8);
  EXPECT_LT(a.error, 1e-8);
}

TEST(ConstantA, StableUnderToleranceHalving) {
  QuadSpec q;
  const ConstantA a = compute_constant_A(q);
  q.t_rel_tol *= 0.5;
  q.t_abs_tol *= 0.5;
  q.radial_rel_tol *= 0.5;
  const ConstantA b = compute_constant_A(q);
  EXPECT_NE(a.fingerprint, b.fingerprint);
  EXPECT_LE(std::abs(a.value - b.value), a.error + b.error);
  EXPECT_LE(std::abs(a.b_route.value - b.b_route.value), a.b_route.error + b.b_route.error);
}

TEST(ConstantA, CachedByQuadratureSettings) {
  const ConstantA a = constant_A(), b = constant_A();
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.fingerprint, QuadSpec{}.fingerprint());
}
