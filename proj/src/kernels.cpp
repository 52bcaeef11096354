#include "loopqed/kernels.hpp"

#include <cmath>
#include <numbers>

#include "loopqed/error.hpp"

namespace loopqed {

namespace {
constexpr double kSeriesCut = 1e-4;

// Reduces tau to |t| in [0, 1] using 1-periodicity; Q and C_even depend only on |t|.
double fold(double tau) {
  double t = std::fmod(std::abs(tau), 1.0);
  return t;
}
}  // namespace

double planck_occupation(double x) {
  if (!(x > 0)) throw DomainError("planck_occupation: x must be positive");
  if (x < 1e-3) {
    const double x2 = x * x;
    return 1.0 / x - 0.5 + x / 12.0 - x * x2 / 720.0 + x * x2 * x2 / 30240.0;
  }
  return 1.0 / std::expm1(x);
}

double photon_covariance(double x, double s, bool periodic) {
  if (periodic) {
    s = std::remainder(s, 1.0);  // (-1/2, 1/2]
  } else if (std::abs(s) > 1.0) {
    throw DomainError("photon_covariance: |tau - tau'| > 1");
  }
  const double n = planck_occupation(x);
  if (s == 0.0) return n;
  if (s > 0) return std::exp(-x * s) * (n + 1.0);
  return std::exp(-x * s) * n;
}

double photon_covariance(double k, double s, double beta, double hbar, double c, bool periodic) {
  return photon_covariance(beta * hbar * c * k, s, periodic);
}

double covariance_even(double x, double s, EqualTime at_zero) {
  if (std::abs(s) > 1.0) throw DomainError("covariance_even: |tau| > 1");
  if (!(x > 0)) throw DomainError("covariance_even: x must be positive");
  if (s == 0.0 && at_zero == EqualTime::discontinuous) return planck_occupation(x);
  const double a = std::abs(s);
  // e^{x(a-1)} + e^{-x a} over 2(1 - e^{-x}), stable for large x.
  return (std::exp(x * (a - 1.0)) + std::exp(-x * a)) / (-2.0 * std::expm1(-x));
}

double q_kernel(double u, double tau) {
  if (u < 0) throw DomainError("q_kernel: u must be non-negative");
  const double t = fold(tau);
  if (u == 0.0) return 1.0;
  if (u < kSeriesCut) {
    const double y2 = (t - 0.5) * (t - 0.5), h2 = 0.25 * u * u;
    return 1.0 + h2 * (2.0 * y2 - 1.0 / 6.0) +
           h2 * h2 * (2.0 / 3.0 * y2 * y2 - y2 / 3.0 + 7.0 / 360.0);
  }
  return 0.5 * u * (std::exp(u * (t - 1.0)) + std::exp(-u * t)) / (-std::expm1(-u));
}

double q_kernel_small_k(double u, double tau) {
  if (std::abs(tau) > 1.0) throw DomainError("q_kernel_small_k: |tau| > 1");
  return 1.0 + 0.5 * u * u * small_k_polynomial(tau);
}

double q_kernel_fourier(double u, long n) {
  if (n == 0) return 1.0;
  const double w = 2.0 * std::numbers::pi * static_cast<double>(n);
  return u * u / (u * u + w * w);
}

double q_kernel_integral(double u, double a, double b) {
  if (a < 0 || b > 1 || a > b) throw DomainError("q_kernel_integral: need 0 <= a <= b <= 1");
  if (u == 0.0) return b - a;
  // (1/2)[sinh(u(b - 1/2)) - sinh(u(a - 1/2))] / sinh(u/2), written without overflow.
  auto ratio = [u](double z) {
    // Small u: the numerator is 2 e^{-u/2} sinh(u z), which cancels in the exponential form.
    if (u < 1.0) return 2.0 * std::exp(-0.5 * u) * std::sinh(u * z) / (-std::expm1(-u));
    return (std::exp(u * (z - 0.5)) - std::exp(-u * (z + 0.5))) / (-std::expm1(-u));
  };
  return 0.5 * (ratio(b - 0.5) - ratio(a - 0.5));
}

}  // namespace loopqed
