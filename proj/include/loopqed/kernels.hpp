#pragma once

namespace loopqed {

// All kernels take the dimensionless photon energy x = beta hbar omega_k = lambda_ph k.

/// Planck occupation 1 / (e^x - 1).
double planck_occupation(double x);

/// Photon covariance e^{-x s} [theta(s)(n + 1) + theta(-s) n] for s != 0, and n at s = 0.
/// With periodic = true, s is first reduced to (-1, 1].
double photon_covariance(double x, double s, bool periodic = false);

/// Same with x = beta hbar c k.
double photon_covariance(double k, double s, double beta, double hbar, double c,
                         bool periodic = false);

enum class EqualTime {
  continuous,     // cosh/sinh formula extended to s = 0 (library default)
  discontinuous,  // n_k at s = 0, as produced by the normal-order prescription
};

/// Even part (1/2)[C(s) + C(-s)] = cosh[x(|s| - 1/2)] / (2 sinh(x/2)), |s| <= 1.
double covariance_even(double x, double s, EqualTime at_zero = EqualTime::continuous);

/// Q(u, tau) = (u/2) cosh[u(|t| - 1/2)] / sinh(u/2), with t the reduction of tau to [-1, 1]
/// (1-periodic). Q = 1 exactly at u = 0.
double q_kernel(double u, double tau);

/// 1 + (u^2/2)(tau^2 - |tau| + 1/6).
double q_kernel_small_k(double u, double tau);

/// Fourier coefficient int_0^1 Q(u, tau) e^{-2 pi i n tau} dtau = u^2 / (u^2 + (2 pi n)^2).
double q_kernel_fourier(double u, long n);

/// int_a^b Q(u, tau) dtau from the closed-form antiderivative, 0 <= a <= b <= 1.
/// Over the full period this is 1 for every u.
double q_kernel_integral(double u, double a, double b);

/// P(s) = s^2 - |s| + 1/6, the O(u^2) coefficient of Q (times 2).
inline double small_k_polynomial(double s) {
  const double a = s < 0 ? -s : s;
  return s * s - a + 1.0 / 6.0;
}

}  // namespace loopqed
