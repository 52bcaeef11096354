#pragma once

#include <array>
#include <complex>
#include <random>
#include <vector>

#include "loopqed/paths.hpp"
#include "loopqed/scales.hpp"

namespace loopqed {

using CVec3 = std::array<std::complex<double>, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Fourier representation of a q = 1 loop: dxi/dtau = sum_{n != 0} w_n e^{2 pi i n tau},
/// w_{-n} = conj(w_n). Stores w_1..w_{n_max}.
struct ModeLoop {
  std::vector<CVec3> w;
  int n_max() const { return static_cast<int>(w.size()); }
};

/// Bridge law: w_n iid standard complex Gaussian (E|w|^2 = 1 per component).
ModeLoop sample_modes(int n_max, std::mt19937_64& engine);

/// w_n = sum_j dX_j e^{-2 pi i n tau_j^mid}; requires q = 1 and n_max < M/2.
ModeLoop grid_modes(const LoopShape& shape, int n_max);

/// D_{mu nu} = int xi_a xi_b - int xi_a int xi_b = sum_{n != 0} w_a,n conj(w_b,n) / (2 pi n)^2.
Mat3 dipole_overlap(const ModeLoop& a, const ModeLoop& b);

/// Radial moments R_l(b) = int_0^inf q^2 j_l(q) / (q^2 + b^2) dq for l = 0, 2, closed form.
double yukawa_moment0(double b);
double yukawa_moment2(double b);

/// Same moments with the form factor: integrand times g^2(q / r). Numerical quadrature.
struct MomentPair {
  double r0 = 0.0;
  double r2 = 0.0;
};
MomentPair yukawa_moments(double b, double r, const FormFactor& g);

/// Transverse Yukawa kernel K(b) = (2/pi)[(2 R0 - R2)/3 delta + R2 rhat rhat].
Mat3 transverse_yukawa_kernel(double r0, double r2, const Vec3& rhat);

/// Magnetic potential in the dipole limit (path exponentials set to 1):
/// W_m = coupling / r * sum_{n != 0} w_a,n^T K(2 pi |n| r / lambda_ph) conj(w_b,n).
/// With a form factor the kernel moments are computed numerically.
double wm_spectral(const ModeLoop& a, const ModeLoop& b, const Vec3& r, double lambda_ph,
                   double coupling);
double wm_spectral(const ModeLoop& a, const ModeLoop& b, const Vec3& r, double lambda_ph,
                   double coupling, const FormFactor& g);

/// Kernels K(2 pi n r / lambda_ph), n = 1..n_max, for repeated evaluation at one separation.
struct SpectralKernel {
  Vec3 r{};
  double rn = 0.0;
  double coupling = 0.0;
  std::vector<Mat3> K;
};
SpectralKernel make_spectral_kernel(const Vec3& r, double lambda_ph, double coupling, int n_max);
SpectralKernel make_spectral_kernel(const Vec3& r, double lambda_ph, double coupling, int n_max,
                                    const FormFactor& g);
/// Uses the first min(n_max) modes of the loops and of the kernel.
double wm_spectral(const ModeLoop& a, const ModeLoop& b, const SpectralKernel& kernel);

/// Dipolar Coulomb tail lambda_a lambda_b D : (delta - 3 rhat rhat) / r^3 from modes.
double wc_spectral(const ModeLoop& a, const ModeLoop& b, const Vec3& r, double lambda_a,
                   double lambda_b);

/// F(x) = sum_{n != 0} K(2 pi |n| / x) : K(2 pi |n| / x), x = lambda_ph / r, so that
/// <W_m^2> = coupling^2 F / r^2 in the dipole limit. Sum plus asymptotic tail.
double wm_mode_sum(double x, int n_terms = 0);

}  // namespace loopqed
