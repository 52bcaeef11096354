#include "loopqed/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loopqed/error.hpp"
#include "loopqed/quadrature.hpp"

namespace loopqed {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// 1 - (1 + b) e^{-b}, accurate for small b.
double one_minus_1pb_exp(double b) {
  if (b > 0.5) return 1.0 - (1.0 + b) * std::exp(-b);
  double term = 1.0, sum = 0.0;
  for (int k = 1; k <= 20; ++k) {
    term *= -b / k;  // (-b)^k / k!
    if (k >= 2) sum += (k - 1) * term;
  }
  return sum;
}
}  // namespace

ModeLoop sample_modes(int n_max, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ModeLoop m;
  m.w.resize(n_max);
  for (auto& v : m.w)
    for (auto& c : v) {
      const double re = normal(engine);
      c = {re, normal(engine)};
    }
  return m;
}

ModeLoop grid_modes(const LoopShape& shape, int n_max) {
  if (shape.q != 1) throw DomainError("grid_modes: q = 1 loops only");
  if (2 * n_max >= shape.M) throw DomainError("grid_modes: n_max must be below M/2");
  ModeLoop m;
  m.w.assign(n_max, CVec3{});
  for (std::size_t j = 0; j < shape.steps(); ++j) {
    const Vec3 d = shape.increment(j);
    const double tau = (j + 0.5) / shape.M;
    for (int n = 1; n <= n_max; ++n) {
      const std::complex<double> phase = std::polar(1.0, -kTwoPi * n * tau);
      for (int c = 0; c < 3; ++c) m.w[n - 1][c] += d[c] * phase;
    }
  }
  return m;
}

Mat3 dipole_overlap(const ModeLoop& a, const ModeLoop& b) {
  Mat3 D{};
  const int n_max = std::min(a.n_max(), b.n_max());
  for (int n = n_max; n >= 1; --n) {  // small terms first
    const double w = 2.0 / ((kTwoPi * n) * (kTwoPi * n));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) D[i][j] += w * std::real(a.w[n - 1][i] * std::conj(b.w[n - 1][j]));
  }
  return D;
}

double yukawa_moment0(double b) { return 0.5 * kPi * std::exp(-b); }

double yukawa_moment2(double b) {
  if (b == 0.0) return 0.25 * kPi;
  return 1.5 * kPi / (b * b) * one_minus_1pb_exp(b) - 0.5 * kPi * std::exp(-b);
}

MomentPair yukawa_moments(double b, double r, const FormFactor& g) {
  const double q_end = g.support_end() * r;
  auto f = [&](double q) {
    const double w = form_factor(g, q / r);
    const double s = q * q * w * w / (q * q + b * b);
    return std::array<double, 2>{s * std::sph_bessel(0, q), s * std::sph_bessel(2, q)};
  };
  // Panels of one oscillation period keep the Kronrod estimate honest.
  MomentPair out;
  const int panels = std::max(1, static_cast<int>(std::ceil(q_end / kPi)));
  for (int p = 0; p < panels; ++p) {
    const double lo = q_end * p / panels, hi = q_end * (p + 1) / panels;
    auto res = quad::integrate<2>(f, lo, hi, 1e-14, 1e-12, 2000, 2);
    out.r0 += res.value[0];
    out.r2 += res.value[1];
  }
  return out;
}

Mat3 transverse_yukawa_kernel(double r0, double r2, const Vec3& rhat) {
  const double alpha = (2.0 / kPi) * (2.0 * r0 - r2) / 3.0;
  const double gamma = (2.0 / kPi) * r2;
  Mat3 K{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) K[i][j] = (i == j ? alpha : 0.0) + gamma * rhat[i] * rhat[j];
  return K;
}

namespace {
template <class Moments>
SpectralKernel kernel_impl(const Vec3& r, double lambda_ph, double coupling, int n_max,
                           Moments&& moments) {
  const double rn = norm(r);
  if (rn == 0.0) throw DomainError("wm_spectral: r = 0");
  if (!(lambda_ph > 0)) throw DomainError("wm_spectral: lambda_ph must be positive");
  const Vec3 rhat{r[0] / rn, r[1] / rn, r[2] / rn};
  SpectralKernel k{r, rn, coupling, {}};
  k.K.reserve(std::max(n_max, 0));
  for (int n = 1; n <= n_max; ++n) {
    const auto [r0, r2] = moments(kTwoPi * n * rn / lambda_ph);
    k.K.push_back(transverse_yukawa_kernel(r0, r2, rhat));
  }
  return k;
}
}  // namespace

SpectralKernel make_spectral_kernel(const Vec3& r, double lambda_ph, double coupling, int n_max) {
  return kernel_impl(r, lambda_ph, coupling, n_max,
                     [](double bn) { return MomentPair{yukawa_moment0(bn), yukawa_moment2(bn)}; });
}

SpectralKernel make_spectral_kernel(const Vec3& r, double lambda_ph, double coupling, int n_max,
                                    const FormFactor& g) {
  const double rn = norm(r);
  return kernel_impl(r, lambda_ph, coupling, n_max,
                     [&](double bn) { return yukawa_moments(bn, rn, g); });
}

double wm_spectral(const ModeLoop& a, const ModeLoop& b, const SpectralKernel& kernel) {
  const int n_max = std::min({a.n_max(), b.n_max(), static_cast<int>(kernel.K.size())});
  double sum = 0.0;
  for (int n = n_max; n >= 1; --n) {
    const Mat3& K = kernel.K[n - 1];
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += K[i][j] * std::real(a.w[n - 1][i] * std::conj(b.w[n - 1][j]));
    sum += 2.0 * s;  // n and -n
  }
  return kernel.coupling * sum / kernel.rn;
}

double wm_spectral(const ModeLoop& a, const ModeLoop& b, const Vec3& r, double lambda_ph,
                   double coupling) {
  const int n = std::min(a.n_max(), b.n_max());
  return wm_spectral(a, b, make_spectral_kernel(r, lambda_ph, coupling, n));
}

double wm_spectral(const ModeLoop& a, const ModeLoop& b, const Vec3& r, double lambda_ph,
                   double coupling, const FormFactor& g) {
  const int n = std::min(a.n_max(), b.n_max());
  return wm_spectral(a, b, make_spectral_kernel(r, lambda_ph, coupling, n, g));
}

double wc_spectral(const ModeLoop& a, const ModeLoop& b, const Vec3& r, double lambda_a,
                   double lambda_b) {
  const double rn = norm(r);
  if (rn == 0.0) throw DomainError("wc_spectral: r = 0");
  const Mat3 D = dipole_overlap(a, b);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      s += D[i][j] * ((i == j ? 1.0 : 0.0) - 3.0 * r[i] * r[j] / (rn * rn));
  return lambda_a * lambda_b * s / (rn * rn * rn);
}

double wm_mode_sum(double x, int n_terms) {
  if (!(x > 0)) throw DomainError("wm_mode_sum: x must be positive");
  if (n_terms <= 0) n_terms = std::max(200, static_cast<int>(std::ceil(50.0 * x)));
  auto kk = [](double b) {
    const double alpha = (2.0 / kPi) * (2.0 * yukawa_moment0(b) - yukawa_moment2(b)) / 3.0;
    const double gamma = (2.0 / kPi) * yukawa_moment2(b);
    return 3.0 * alpha * alpha + 2.0 * alpha * gamma + gamma * gamma;
  };
  // Asymptotically K:K = 6 / b^4; the tail sum over n > N uses the midpoint integral.
  const double c = x / kTwoPi;
  const double nt = n_terms + 0.5;
  double sum = 6.0 * c * c * c * c / (3.0 * nt * nt * nt);
  for (int n = n_terms; n >= 1; --n) sum += kk(n / c);
  return 2.0 * sum;
}

}  // namespace loopqed
