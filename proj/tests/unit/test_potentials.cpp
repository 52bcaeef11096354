#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "loopqed/error.hpp"
#include "loopqed/potentials.hpp"
#include "loopqed/rng.hpp"
#include "loopqed/spectral.hpp"

using namespace loopqed;

namespace {
double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// Moderate settings: k_cut r = 4, so the radial domain holds a few oscillations.
PairContext context(const LoopShape& a, const LoopShape& b, Vec3 r, double la, double lb,
                    double lph, double coupling = 1.0) {
  PairContext ctx;
  ctx.a = &a;
  ctx.b = &b;
  ctx.r = r;
  ctx.lambda_a = la;
  ctx.lambda_b = lb;
  ctx.lambda_ph = lph;
  ctx.coupling = coupling;
  ctx.g = {FormFactorKind::gaussian, 4.0};
  ctx.quad.polar_nodes = 24;
  ctx.quad.azimuth_nodes = 24;
  ctx.quad.radial_rel_tol = 1e-8;
  return ctx;
}
}  // namespace

TEST(Coulomb, PointParticles) {
  const LoopShape p = LoopShape::frozen(1, 16);
  const Vec3 ra{1.0, 2.0, 3.0}, rb{-1.0, 0.0, 2.0};
  const auto v = coulomb_pair(p, ra, 0.0, p, rb, 0.0);
  EXPECT_NEAR(v.value, 1.0 / 3.0, 1e-15);
  EXPECT_FALSE(v.regularized);
  EXPECT_THROW(coulomb_pair(p, ra, 0.0, p, ra, 0.0), DomainError);
}

TEST(Coulomb, MultipoleOracleFarAway) {
  // |r| = 1e4 lambda: 1/r - rhat.(la xbar_a - lb xbar_b)/r^2 with xbar the matched-time mean.
  for (std::uint64_t i = 0; i < 5; ++i) {
    const LoopShape a = sample_bridge(1, 64, 31, i), b = sample_bridge(1, 64, 32, i);
    const Vec3 ra{3e3, -4e3, 1e3}, rb{-2e3, 2e3, -2e3};
    const double lam = norm(Vec3{5e3, -6e3, 3e3}) / 1e4;
    Vec3 d{ra[0] - rb[0], ra[1] - rb[1], ra[2] - rb[2]};
    const double rn = norm(d);
    Vec3 xa{}, xb{};
    for (int j = 0; j < 64; ++j)
      for (int c = 0; c < 3; ++c) {
        xa[c] += a.X[j][c] / 64.0;
        xb[c] += b.X[j][c] / 64.0;
      }
    double dip = 0.0;
    for (int c = 0; c < 3; ++c) dip += d[c] / rn * lam * (xa[c] - xb[c]);
    const double oracle = 1.0 / rn - dip / (rn * rn);
    const double v = coulomb_pair(a, ra, lam, b, rb, lam).value;
    EXPECT_NEAR(v * rn, oracle * rn, 1e-6) << i;
    EXPECT_NEAR(v * rn, 1.0, 1e-3);
  }
}

TEST(Coulomb, SymmetricAndTranslationInvariant) {
  const LoopShape a = sample_bridge(2, 16, 1, 0), b = sample_bridge(1, 16, 1, 1);
  const Vec3 ra{0.5, 0.0, 0.1}, rb{0.0, 0.3, -0.2}, t{10.0, -3.0, 7.0};
  const double v = coulomb_pair(a, ra, 0.3, b, rb, 0.2).value;
  EXPECT_NEAR(coulomb_pair(b, rb, 0.2, a, ra, 0.3).value, v, 1e-13);
  const Vec3 ra2{ra[0] + t[0], ra[1] + t[1], ra[2] + t[2]}, rb2{rb[0] + t[0], rb[1] + t[1], rb[2] + t[2]};
  EXPECT_NEAR(coulomb_pair(a, ra2, 0.3, b, rb2, 0.2).value, v, 1e-12);
}

TEST(Coulomb, RegularizesCoincidentPoints) {
  const LoopShape a = sample_bridge(1, 16, 2, 0);
  const auto v = coulomb_pair(a, Vec3{0, 0, 0}, 1.0, a, Vec3{0, 0, 0}, 1.0);
  EXPECT_TRUE(v.regularized);
  EXPECT_NEAR(v.value, 1e3, 1e-9);  // every matched point capped at 1 / (eps lambda)
}

TEST(SelfEnergy, VanishesForSingleWinding) {
  const auto u = self_energy(sample_bridge(1, 32, 4, 0), 1.0, 1.0);
  EXPECT_EQ(u.value, 0.0);
  EXPECT_FALSE(u.regularized);
}

TEST(SelfEnergy, HandCountOnTwoSlicePath) {
  // q = 2, M = 2: the particles at tau and tau + 1 are (X0, X2) and (X1, X3).
  LoopShape s = LoopShape::frozen(2, 2);
  s.X[1] = {1.0, 0.0, 0.0};
  s.X[2] = {0.0, 2.0, 0.0};
  s.X[3] = {0.0, 0.0, 3.0};
  const double lambda = 0.5, e = 2.0;
  // (e^2/2) sum_{m != m'} (1/M) sum_j 1/|lambda dX|: each unordered pair appears twice.
  const double expected = 0.5 * e * e * (1.0 / (lambda * 2.0) + 1.0 / (lambda * std::sqrt(10.0)));
  EXPECT_NEAR(self_energy(s, lambda, e).value, expected, 1e-14);
}

TEST(SelfEnergy, NonNegativeAndTranslationInvariant) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    LoopShape s = sample_bridge(3, 16, 5, i);
    const double u = self_energy(s, 0.7, 1.0).value;
    EXPECT_GT(u, 0.0);
    for (auto& p : s.X) p[0] += 4.0;  // rigid shift of the whole loop
    EXPECT_NEAR(self_energy(s, 0.7, 1.0).value, u, 1e-12 * u);
  }
}

TEST(CoulombTail, ScalingAndDomain) {
  const LoopShape a = sample_bridge(1, 64, 6, 0), b = sample_bridge(1, 64, 6, 1);
  const Vec3 r{0.3, 0.4, 1.2}, r2{0.6, 0.8, 2.4};
  EXPECT_NEAR(w_coulomb_tail(a, b, r, 0.1, 0.2) / w_coulomb_tail(a, b, r2, 0.1, 0.2), 8.0, 1e-10);
  EXPECT_THROW(w_coulomb_tail(a, b, Vec3{0, 0, 0}, 1, 1), DomainError);
  EXPECT_EQ(w_coulomb_tail(a, b, r, 0.0, 0.2), 0.0);
}

TEST(CoulombTail, EnsembleMeanIsZero) {
  const std::size_t N = 20000;
  double s = 0, ss = 0;
  const Vec3 r{1.0, 2.0, 2.0};
  for (std::size_t i = 0; i < N; ++i) {
    auto e = sample_engine(7, i);
    const LoopShape a = sample_bridge(1, 32, e), b = sample_bridge(1, 32, e);
    const double w = w_coulomb_tail(a, b, r, 1.0, 1.0);
    s += w;
    ss += w * w;
  }
  const double mean = s / N, se = std::sqrt((ss / N - mean * mean) / N);
  EXPECT_LE(std::abs(mean), 3 * se);
}

TEST(CoulombTail, IsTheMixedSecondOrderOfCoulombPair) {
  // Mixed difference V(la, lb) - V(la, 0) - V(0, lb) + V(0, 0) of the matched-time Coulomb sum
  // on mean-free midpoint loops isolates the lambda_a lambda_b dipole term.
  auto centred = [](const LoopShape& s) {
    LoopShape c = s;
    Vec3 m{};
    for (int j = 0; j < s.M; ++j)
      for (int k = 0; k < 3; ++k) m[k] += s.midpoint(j)[k] / s.M;
    for (int j = 0; j < s.M; ++j)
      for (int k = 0; k < 3; ++k) c.X[j][k] = s.midpoint(j)[k] - m[k];
    return c;
  };
  for (std::uint64_t i = 0; i < 5; ++i) {
    const LoopShape a = sample_bridge(1, 64, 8, 2 * i), b = sample_bridge(1, 64, 8, 2 * i + 1);
    const LoopShape ca = centred(a), cb = centred(b);
    const Vec3 r{0.3, 0.4, 1.2}, o{0, 0, 0};
    const double la = 2e-3, lb = 3e-3;
    const double mixed = coulomb_pair(ca, r, la, cb, o, lb).value - coulomb_pair(ca, r, la, cb, o, 0).value -
                         coulomb_pair(ca, r, 0, cb, o, lb).value + coulomb_pair(ca, r, 0, cb, o, 0).value;
    const double w = w_coulomb_tail(a, b, r, la, lb);
    EXPECT_NEAR(mixed, w, 2e-2 * std::abs(w) + 1e-12) << i;
  }
}

TEST(Toeplitz, FastMatchesReference) {
  std::mt19937_64 e(1);
  std::normal_distribution<double> n;
  for (std::size_t M : {2u, 7u, 64u, 200u})
    for (double u : {0.0, 1e-6, 0.3, 5.0, 80.0, 2000.0}) {
      std::vector<std::complex<double>> x(M), y(M);
      for (std::size_t i = 0; i < M; ++i) {
        x[i] = {n(e), n(e)};
        y[i] = {n(e), n(e)};
      }
      const auto f = toeplitz_q_sum(x, y, u, ToeplitzMethod::fast);
      const auto r = toeplitz_q_sum(x, y, u, ToeplitzMethod::reference);
      EXPECT_NEAR(std::abs(f - r), 0.0, 1e-11 * (1.0 + std::abs(r)) * std::max(1.0, u)) << M << " " << u;
    }
}

TEST(Magnetic, FrozenPathsGiveZero) {
  const LoopShape z = LoopShape::frozen(1, 16), b = sample_bridge(1, 16, 9, 0);
  const auto ctx = context(z, b, Vec3{0, 0, 1}, 0.1, 0.1, 2.0);
  EXPECT_EQ(w_magnetic(ctx).value, 0.0);
}

TEST(Magnetic, ClassicalLimitMatchesSeparateEvaluator) {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const LoopShape a = sample_bridge(1, 16, 10, i), b = sample_bridge(1, 16, 11, i);
    const auto ctx = context(a, b, Vec3{0.2, -0.5, 0.8}, 0.3, 0.4, 0.0);
    const auto q = w_magnetic(ctx), c = w_magnetic_classical(ctx);
    EXPECT_NEAR(q.integral, c.integral, q.error + c.error + 1e-12) << i;
    EXPECT_NEAR(q.integral, c.integral, 1e-10 * std::abs(c.integral) + 1e-12) << i;
  }
}

TEST(Magnetic, SymmetricUnderExchange) {
  const LoopShape a = sample_bridge(1, 16, 12, 0), b = sample_bridge(1, 16, 12, 1);
  const auto ab = w_magnetic(context(a, b, Vec3{0.3, 0.1, -0.7}, 0.2, 0.5, 1.5));
  const auto ba = w_magnetic(context(b, a, Vec3{-0.3, -0.1, 0.7}, 0.5, 0.2, 1.5));
  EXPECT_NEAR(ab.value, ba.value, 1e-10 * std::max(1.0, std::abs(ab.value)));
}

TEST(Magnetic, TransverseDecomposition) {
  const LoopShape a = sample_bridge(1, 16, 13, 0), b = sample_bridge(1, 16, 13, 1);
  const auto ctx = context(a, b, Vec3{0.0, 0.6, 0.8}, 0.3, 0.3, 1.0);
  MagneticOptions o;
  o.projector = Projector::transverse;
  const auto t = w_magnetic(ctx, o);
  o.projector = Projector::longitudinal;
  const auto l = w_magnetic(ctx, o);
  o.projector = Projector::identity;
  const auto d = w_magnetic(ctx, o);
  EXPECT_NEAR(t.integral + l.integral, d.integral, t.error + l.error + d.error);
}

TEST(Magnetic, BilinearWithFrozenExponentials) {
  // lambda = 0 freezes the phases; the coupling is set independently.
  LoopShape a = sample_bridge(1, 16, 14, 0), b = sample_bridge(1, 16, 14, 1);
  const double base = w_magnetic(context(a, b, Vec3{0, 0, 1}, 0.0, 0.0, 1.0)).integral;
  for (auto& p : a.X)
    for (auto& c : p) c *= 2.0;
  for (auto& p : b.X)
    for (auto& c : p) c *= -3.0;
  const double scaled = w_magnetic(context(a, b, Vec3{0, 0, 1}, 0.0, 0.0, 1.0)).integral;
  EXPECT_NEAR(scaled, -6.0 * base, 1e-9 * std::abs(base));
}

TEST(Magnetic, ErrorEstimateBoundsNodeDoubling) {
  int bounded = 0;
  const int pairs = 20;
  for (int i = 0; i < pairs; ++i) {
    const LoopShape a = sample_bridge(1, 8, 15, i), b = sample_bridge(1, 8, 16, i);
    auto ctx = context(a, b, Vec3{0.1, 0.2, 0.9}, 0.4, 0.4, 1.0);
    ctx.quad.polar_nodes = ctx.quad.azimuth_nodes = 12;
    const auto coarse = w_magnetic(ctx);
    ctx.quad.polar_nodes = ctx.quad.azimuth_nodes = 24;
    const auto fine = w_magnetic(ctx);
    if (std::abs(fine.integral - coarse.integral) <= coarse.error + fine.error) ++bounded;
  }
  EXPECT_EQ(bounded, pairs);
}

TEST(Magnetic, FailureCarriesAchievedError) {
  // Far more oscillations than the panels can resolve, and no room to subdivide.
  const LoopShape a = sample_bridge(1, 16, 17, 0), b = sample_bridge(1, 16, 17, 1);
  auto ctx = context(a, b, Vec3{0.0, 0.0, 3.0}, 0.5, 0.5, 1.0);
  ctx.g = {FormFactorKind::gaussian, 300.0};
  ctx.quad.radial_max_intervals = 1;
  ctx.quad.radial_rel_tol = 1e-14;
  ctx.quad.radial_abs_tol = 1e-300;
  try {
    w_magnetic(ctx);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_GT(e.achieved(), 0.0);
  }
  MagneticOptions o;
  o.throw_on_failure = false;
  EXPECT_FALSE(w_magnetic(ctx, o).converged);
}

namespace {
// Smooth closed loop with a few Fourier modes, sampled on the grid (X_0 = 0).
LoopShape smooth_loop(int M, std::uint64_t seed) {
  std::mt19937_64 e(seed);
  std::normal_distribution<double> n;
  std::vector<std::array<std::complex<double>, 3>> c(3);
  for (auto& cn : c)
    for (auto& v : cn) v = {n(e), n(e)};
  LoopShape s = LoopShape::frozen(1, M);
  for (int j = 0; j < M; ++j)
    for (int m = 1; m <= 3; ++m) {
      const auto ph = std::polar(1.0, 2.0 * std::numbers::pi * m * j / M) - 1.0;
      for (int k = 0; k < 3; ++k) s.X[j][k] += std::real(c[m - 1][k] * ph) / (2.0 * m);
    }
  return s;
}
}  // namespace

TEST(Magnetic, DipoleLimitMatchesSpectralKernel) {
  // lambda / r -> 0 on band-limited loops: the k-space evaluator reduces to the mode form,
  // up to the O(M^-2) grid error of the Q-kernel sum.
  const double lph = 1.0, lam = 1e-6;
  const FormFactor g{FormFactorKind::gaussian, 4.0};
  const Vec3 rv{0.0, 0.6, 0.8};
  auto gap = [&](int M, std::uint64_t i) {
    const LoopShape a = smooth_loop(M, 100 + i), b = smooth_loop(M, 200 + i);
    const auto km = w_magnetic(context(a, b, rv, lam, lam, lph));
    const double sp = wm_spectral(grid_modes(a, 8), grid_modes(b, 8), rv, lph, 1.0, g);
    return std::pair{km.value - sp, sp};
  };
  for (std::uint64_t i = 0; i < 3; ++i) {
    const auto [d, sp] = gap(128, i);
    EXPECT_LE(std::abs(d), 3e-3 * std::abs(sp)) << i;
  }
  const double ratio = gap(64, 0).first / gap(128, 0).first;
  EXPECT_NEAR(ratio, 4.0, 0.5);
}

TEST(Gibbs, TrivialCases) {
  const QuadSpec q;
  const FormFactor g{FormFactorKind::gaussian, 4.0};
  EXPECT_EQ(gibbs_weight({}, 1.0, 1.0, g, q).weight, 1.0);
  std::vector<Loop> pts{{LoopShape::frozen(1, 8), {0, 0, 0}, 0.0, 1.0},
                        {LoopShape::frozen(1, 8), {0, 0, 2}, 0.0, -2.0}};
  EXPECT_NEAR(gibbs_weight(pts, 0.5, 1.0, g, q).weight, std::exp(-0.5 * (1.0 * -2.0) / 2.0), 1e-14);
  std::vector<Loop> one{{LoopShape::frozen(1, 8), {0, 0, 0}, 0.3, 1.0}};
  EXPECT_EQ(gibbs_weight(one, 0.5, 1.0, g, q).weight, 1.0);
  const auto ext = gibbs_weight(one, 0.5, 1.0, g, q, [](const Loop&) { return 2.0; });
  EXPECT_NEAR(ext.exponent, -1.0, 1e-15);
}

TEST(Gibbs, SingleLoopSelfTerm) {
  QuadSpec q;
  q.polar_nodes = q.azimuth_nodes = 16;
  q.radial_rel_tol = 1e-6;
  const FormFactor g{FormFactorKind::gaussian, 4.0};
  std::vector<Loop> one{{sample_bridge(1, 16, 20, 0), {0, 0, 0}, 0.3, 1.5}};
  PairContext ctx;
  ctx.a = ctx.b = &one[0].shape;
  ctx.lambda_a = ctx.lambda_b = 0.3;
  ctx.lambda_ph = 2.0;
  ctx.coupling = magnetic_coupling(0.3, 0.3, 2.0);
  ctx.g = g;
  ctx.quad = q;
  const double w = w_magnetic(ctx).value;
  EXPECT_NEAR(gibbs_weight(one, 0.7, 2.0, g, q).exponent, -0.7 * 0.5 * 1.5 * 1.5 * w, 1e-14);
}

TEST(Gibbs, NonFiniteComponentNamesThePair) {
  const FormFactor g{FormFactorKind::gaussian, 4.0};
  std::vector<Loop> pts{{LoopShape::frozen(1, 8), {0, 0, 0}, 0.0, 1.0},
                        {LoopShape::frozen(1, 8), {0, 0, 1}, 0.0, 1.0}};
  try {
    gibbs_weight(pts, 1.0, 1.0, g, {}, [](const Loop& l) { return l.anchor[2] > 0 ? NAN : 0.0; });
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("loop 1"), std::string::npos);
  }
}
