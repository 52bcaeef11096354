#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "loopqed/error.hpp"
#include "loopqed/potentials.hpp"
#include "loopqed/rng.hpp"
#include "loopqed/spectral.hpp"

using namespace loopqed;
constexpr double kPi = std::numbers::pi;

TEST(Yukawa, ClosedFormsMatchOscillatoryQuadrature) {
  // References: mpmath quadosc of int_0^inf q^2 j_l(q) / (q^2 + b^2) dq, 25 digits.
  struct Ref {
    double b, r0, r2;
  };
  for (const Ref& ref : {Ref{0.1, 1.4213152925974636, 0.7835361887085216},
                         Ref{1.0, 0.57786367489546086, 0.66734325611646385},
                         Ref{5.0, 0.010583942396302148, 0.1702911782937479}}) {
    EXPECT_NEAR(yukawa_moment0(ref.b), ref.r0, 1e-15);
    EXPECT_NEAR(yukawa_moment2(ref.b), ref.r2, 1e-15);
  }
  EXPECT_DOUBLE_EQ(yukawa_moment2(0.0), kPi / 4.0);
  // Series branch meets the direct formula.
  EXPECT_NEAR(yukawa_moment2(std::nextafter(0.5, 0.0)), yukawa_moment2(0.5), 1e-14);
}

TEST(Yukawa, GaussianCutoffMoments) {
  // mpmath quad of q^2 j_l(q) exp(-q^2 / 2500) / (q^2 + b^2) over [0, 400], panels of pi.
  struct Ref {
    double b, r0, r2;
  };
  const FormFactor g{FormFactorKind::gaussian, 50.0};
  for (const Ref& ref : {Ref{0.3, 1.163716432907079, 0.76844903428271858},
                         Ref{2.0, 0.21292457271200268, 0.48609238378216375},
                         Ref{8.0, 0.00054060736811000435, 0.072862401716979367}}) {
    const MomentPair m = yukawa_moments(ref.b, 1.0, g);
    EXPECT_NEAR(m.r0, ref.r0, 1e-12) << ref.b;
    EXPECT_NEAR(m.r2, ref.r2, 1e-12) << ref.b;
    // The cutoff shifts the moments only at O(b^2 / (k_cut r)^2).
    EXPECT_NEAR(m.r0, yukawa_moment0(ref.b), 5e-3);
  }
}

TEST(ModeLoops, GridModesOfASineLoop) {
  // X = a sin(2 pi tau) e_x: w_1 = pi a, other modes vanish; D_xx = a^2 / 2.
  const int M = 512;
  const double a = 0.7;
  LoopShape s = LoopShape::frozen(1, M);
  for (int j = 0; j <= M; ++j) s.X[j][0] = a * std::sin(2 * kPi * j / M);
  const ModeLoop m = grid_modes(s, 4);
  EXPECT_NEAR(std::real(m.w[0][0]), kPi * a, 1e-4);
  EXPECT_NEAR(std::imag(m.w[0][0]), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(m.w[1][0]), 0.0, 1e-12);
  EXPECT_NEAR(dipole_overlap(m, m)[0][0], a * a / 2.0, 1e-4);
  EXPECT_NEAR(dipole_overlap(s, s)[0][0], a * a / 2.0, 1e-4);
  EXPECT_THROW(grid_modes(s, M / 2), DomainError);
}

TEST(ModeLoops, WcFromModesMatchesGridPath) {
  // Same loop seen through its modes and through its grid: D agrees to the mode truncation.
  for (std::uint64_t i = 0; i < 5; ++i) {
    const LoopShape a = sample_bridge(1, 2048, 21, i), b = sample_bridge(1, 2048, 22, i);
    const Vec3 r{0.3, -1.0, 2.0};
    const double grid = w_coulomb_tail(a, b, r, 1.0, 1.0);
    const double modes = wc_spectral(grid_modes(a, 1000), grid_modes(b, 1000), r, 1.0, 1.0);
    EXPECT_NEAR(modes, grid, 2e-3 * std::abs(w_coulomb_tail(a, a, r, 1.0, 1.0))) << i;
  }
}

TEST(Spectral, FrozenAndSymmetric) {
  auto e = sample_engine(3, 0);
  const ModeLoop a = sample_modes(50, e), b = sample_modes(50, e);
  const ModeLoop zero{std::vector<CVec3>(50)};
  const Vec3 r{0.4, 0.2, -0.9}, mr{-0.4, -0.2, 0.9};
  EXPECT_EQ(wm_spectral(zero, b, r, 3.0, 0.5), 0.0);
  EXPECT_NEAR(wm_spectral(a, b, r, 3.0, 0.5), wm_spectral(b, a, mr, 3.0, 0.5), 1e-14);
  EXPECT_NEAR(wc_spectral(a, b, r, 1.0, 2.0), wc_spectral(b, a, mr, 1.0, 2.0), 1e-14);
  EXPECT_THROW(wm_spectral(a, b, Vec3{0, 0, 0}, 3.0, 0.5), DomainError);
}

TEST(Spectral, BeyondPhotonScreening) {
  // For r >> lambda_ph the transverse kernel reduces to (3 rhat rhat - delta) / b^2 and
  // W_m = -W_c exactly up to e^{-2 pi r / lambda_ph}.
  auto e = sample_engine(4, 0);
  for (int i = 0; i < 10; ++i) {
    const ModeLoop a = sample_modes(200, e), b = sample_modes(200, e);
    const Vec3 r{1.0, 2.0, -2.0};
    const double lph = 0.3, la = 0.01, lb = 0.02;
    const double wm = wm_spectral(a, b, r, lph, magnetic_coupling(la, lb, lph));
    const double wc = wc_spectral(a, b, r, la, lb);
    EXPECT_NEAR(wm + wc, 0.0, 1e-12 * std::abs(wc)) << i;
  }
}

TEST(Spectral, PrecomputedKernelMatchesDirect) {
  auto e = sample_engine(5, 0);
  const ModeLoop a = sample_modes(80, e), b = sample_modes(80, e);
  const Vec3 r{0.0, 0.6, 0.8};
  const SpectralKernel k = make_spectral_kernel(r, 20.0, 0.1, 80);
  EXPECT_EQ(wm_spectral(a, b, k), wm_spectral(a, b, r, 20.0, 0.1));
  const SpectralKernel kg = make_spectral_kernel(r, 20.0, 0.1, 80, {FormFactorKind::gaussian, 60.0});
  const FormFactor g{FormFactorKind::gaussian, 60.0};
  EXPECT_EQ(wm_spectral(a, b, kg), wm_spectral(a, b, r, 20.0, 0.1, g));
  EXPECT_NEAR(wm_spectral(a, b, kg), wm_spectral(a, b, k), 1e-2 * std::abs(wm_spectral(a, b, k)));
}

TEST(Spectral, ModeSumMatchesHighPrecisionSum) {
  // 2 sum_{n>=1} K:K(2 pi n / x) at 30 digits: explicit head plus an extrapolated tail.
  EXPECT_NEAR(wm_mode_sum(1.0) / 0.0077657681853466462, 1.0, 1e-10);
  EXPECT_NEAR(wm_mode_sum(10.0) / 1.9554568862315848, 1.0, 1e-10);
  EXPECT_NEAR(wm_mode_sum(100.0) / 30.358906723101107, 1.0, 1e-10);
  EXPECT_THROW(wm_mode_sum(0.0), DomainError);
}

TEST(Spectral, ModeSumApproachesLinearGrowth) {
  // F(x) / x -> 1/pi: the constant of the sub-photon regime.
  const double a = wm_mode_sum(1000.0) / 1000.0 * kPi;
  EXPECT_NEAR(a, 1.0, 0.01);
  EXPECT_GT(a, wm_mode_sum(100.0) / 100.0 * kPi);
}

TEST(Spectral, MonteCarloVarianceMatchesModeSum) {
  // <W_m^2> over mode loops = coupling^2 * 2 sum K:K / r^2.
  const int nm = 64;
  const Vec3 r{0.0, 0.0, 1.0};
  const double x = 5.0;
  const SpectralKernel k = make_spectral_kernel(r, x, 1.0, nm);
  double kk = 0.0;
  for (const auto& K : k.K)
    for (const auto& row : K)
      for (double v : row) kk += v * v;
  const std::size_t N = 40000;
  double s = 0, ss = 0;
  for (std::size_t i = 0; i < N; ++i) {
    auto e = sample_engine(8, i);
    const ModeLoop a = sample_modes(nm, e), b = sample_modes(nm, e);
    const double w2 = std::pow(wm_spectral(a, b, k), 2);
    s += w2;
    ss += w2 * w2;
  }
  const double mean = s / N, se = std::sqrt((ss / N - mean * mean) / N);
  EXPECT_LE(std::abs(mean - 2.0 * kk), 3.0 * se);
  EXPECT_NEAR(2.0 * kk / wm_mode_sum(x), 1.0, 1e-4);
}
