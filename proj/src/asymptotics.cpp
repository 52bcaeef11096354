#include "loopqed/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "loopqed/error.hpp"
#include "loopqed/kernels.hpp"
#include "loopqed/quadrature.hpp"

namespace loopqed {

namespace {
constexpr double kPi = std::numbers::pi;

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double E(double z) { return -std::expm1(-z); }  // 1 - e^{-z}

double contract(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a[i][j] * b[i][j];
  return s;
}
}  // namespace

KTensor longitudinal_k_tensor(const Vec3& r) {
  const double rn = norm(r);
  if (rn == 0.0) throw DomainError("longitudinal_k_tensor: r = 0");
  // In q = k r: alpha = (1/2pi^2 r^3) int q j1(q) f dq, gamma = -(1/2pi^2 r^3) int q^2 j2(q) f dq,
  // with the regulator f = exp(-eps^2 q^2 / 2), eps = 1/8.
  constexpr double eps = 0.125;
  const double q_max = 12.0 / eps;
  auto f = [&](double q) {
    const double w = std::exp(-0.5 * eps * eps * q * q);
    return std::array<double, 2>{q * std::sph_bessel(1, q) * w,
                                 q * q * std::sph_bessel(2, q) * w};
  };
  quad::AdaptiveOptions opt;
  opt.driving = 2;
  opt.initial_panels = static_cast<std::size_t>(std::ceil(q_max / kPi));
  const auto res = quad::integrate<2>(f, 0.0, q_max, 1e-15, 1e-13, opt);
  if (!res.converged) throw NumericError("longitudinal_k_tensor: quadrature failed", res.error);
  const double pref = 1.0 / (2.0 * kPi * kPi * rn * rn * rn);
  const double alpha = pref * res.value[0], gamma = -pref * res.value[1];
  KTensor t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t.value[i][j] = (i == j ? alpha : 0.0) + gamma * r[i] * r[j] / (rn * rn);
  // Quadrature error plus the regulator's exp(-r^2 / 2 eps^2 r^2) = e^{-32} relative bias.
  t.error = pref * res.error + std::exp(-0.5 / (eps * eps)) * 3.0 / (4.0 * kPi * rn * rn * rn);
  return t;
}

Mat3 small_k_double_integral(const LoopShape& a, const LoopShape& b) {
  if (a.q != 1 || b.q != 1) throw DomainError("small_k_double_integral: q = 1 filaments only");
  if (a.M != b.M) throw DomainError("small_k_double_integral: loops must share the time grid");
  const int M = a.M;
  std::vector<double> P(2 * M - 1);
  for (int d = -(M - 1); d <= M - 1; ++d) P[d + M - 1] = small_k_polynomial(static_cast<double>(d) / M);
  Mat3 S{};
  for (int j = 0; j < M; ++j) {
    const Vec3 da = a.increment(j);
    Vec3 row{};  // sum_l dX_b,l P(tau_j - tau_l)
    for (int l = 0; l < M; ++l) {
      const Vec3 db = b.increment(l);
      const double p = P[j - l + M - 1];
      for (int c = 0; c < 3; ++c) row[c] += db[c] * p;
    }
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) S[i][k] += da[i] * row[k];
  }
  return S;
}

CorrectionValue wm_quantum_correction(const PairContext& ctx) {
  return wm_quantum_correction(ctx, longitudinal_k_tensor(ctx.r));
}

CorrectionValue wm_quantum_correction(const PairContext& ctx, const KTensor& T) {
  const Mat3 S = small_k_double_integral(*ctx.a, *ctx.b);
  const double pref = -2.0 * kPi * ctx.lambda_a * ctx.lambda_b;
  double s_norm = 0.0;
  for (const auto& row : S)
    for (double v : row) s_norm += v * v;
  return {pref * contract(T.value, S), std::abs(pref) * 3.0 * T.error * std::sqrt(s_norm)};
}

IbpCheck ibp_identity_check(const LoopShape& a, const LoopShape& b) {
  IbpCheck out;
  out.lhs = small_k_double_integral(a, b);
  const Mat3 D = dipole_overlap(a, b);
  double g2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.rhs[i][j] = 2.0 * D[i][j];
      g2 += (out.lhs[i][j] - out.rhs[i][j]) * (out.lhs[i][j] - out.rhs[i][j]);
    }
  out.gap = std::sqrt(g2);
  return out;
}

double cancellation_budget(const PairContext& ctx, double k_tensor_error) {
  const LoopShape &a = *ctx.a, &b = *ctx.b;
  double cell = 0.0;
  for (std::size_t j = 0; j < a.steps(); ++j) cell += norm(a.increment(j)) * norm(b.increment(j));
  const double rn = norm(ctx.r);
  return k_tensor_error +
         ctx.lambda_a * ctx.lambda_b * 2.0 * cell / (4.0 * a.M * rn * rn * rn);
}

std::pair<double, double> lambda_identity(double beta, double m_a, double m_b, double hbar,
                                          double c) {
  if (!(beta > 0 && m_a > 0 && m_b > 0 && hbar > 0 && c > 0))
    throw DomainError("lambda_identity: inputs must be positive");
  const double lambda_ph = beta * hbar * c;
  const double lhs = lambda_ph * lambda_ph / (beta * std::sqrt(m_a * m_b) * c * c);
  const double rhs = hbar * std::sqrt(beta / m_a) * hbar * std::sqrt(beta / m_b);
  return {lhs, rhs};
}

double tail_amplitude_8_10(std::span<const DressedSpecies> species, double beta, double hbar,
                           double c) {
  double sa = 0.0, sb = 0.0;
  for (const auto& s : species) {
    const double w = s.charge * s.charge / (beta * s.mass * c * c);
    sa += s.integral_a1 * w;
    sb += s.integral_2b * w;
  }
  const double hb = hbar * beta;
  return hb * hb * hb * hb / 48.0 * sa * sb;
}

double bracket_C4(double x, double q1, double q2) {
  if (!(x > 0) || !(q1 > 0) || !(q2 > 0)) throw DomainError("bracket_C4: arguments must be positive");
  const double a = x * q1, b = x * q2;
  // (e^{-b} - e^{-a}) / (a - b) = e^{-c} sinh(h) / h, c = (a + b)/2, h = (a - b)/2.
  double cross;
  if (std::abs(q1 - q2) < 1e-6 * (q1 + q2)) {
    const double h = 0.5 * (a - b), h2 = h * h;
    cross = std::exp(-0.5 * (a + b)) * (1.0 + h2 / 6.0 + h2 * h2 / 120.0);
  } else {
    const double lo = std::min(a, b), d = std::abs(a - b);
    cross = std::exp(-lo) * E(d) / d;
  }
  const double s = a + b;
  return 0.5 * a * b / (E(a) * E(b)) * (E(s) / s + cross) - 1.0;
}

double bracket_C4_quadrature(double x, double q1, double q2, double tol) {
  const double u1 = x * q1, u2 = x * q2;
  // Symmetric about t = 1/2; Q - 1 is carried separately to keep small-u digits.
  auto f = [&](double t) {
    const double d1 = q_kernel(u1, t) - 1.0, d2 = q_kernel(u2, t) - 1.0;
    return d1 * d2 + d1 + d2;
  };
  quad::AdaptiveOptions opt;
  opt.max_intervals = 4000;
  opt.initial_panels = 8;
  const auto res = quad::integrate<1>([&](double t) { return std::array<double, 1>{f(t)}; },
                                      0.0, 0.5, tol, tol, opt);
  if (!res.converged) throw NumericError("bracket_C4_quadrature: not converged", res.error);
  return 2.0 * res.value[0];
}

double bracket_C4_modes(double x, double q1, double q2) {
  const double u1 = x * q1, u2 = x * q2;
  const long N = std::max<long>(2000, static_cast<long>(100.0 * std::max(u1, u2)));
  const double nt = N + 0.5;
  double sum = u1 * u1 * u2 * u2 / std::pow(2.0 * kPi, 4) / (3.0 * nt * nt * nt);
  for (long n = N; n >= 1; --n) sum += q_kernel_fourier(u1, n) * q_kernel_fourier(u2, n);
  return 2.0 * sum;
}

double bracket_C4_asymptote(double x, double q1, double q2) { return x * q1 * q2 / (2.0 * (q1 + q2)); }

double wm_sq_prediction(double r, double lambda_ph, double lambda_a, double lambda_b, double A) {
  return A * lambda_a * lambda_a * lambda_b * lambda_b / (r * r * r * lambda_ph * lambda_ph * lambda_ph);
}

double wc_sq_prediction(double r, double lambda_a, double lambda_b) {
  const double r3 = r * r * r;
  return lambda_a * lambda_a * lambda_b * lambda_b / (120.0 * r3 * r3);
}

RegimeMagnitudes regime_magnitudes(double r, double lambda_a, double lambda_b, double lambda_ph) {
  if (!(r > 0)) throw DomainError("regime_magnitudes: r must be positive");
  RegimeMagnitudes m;
  const double coupling = magnetic_coupling(lambda_a, lambda_b, lambda_ph);
  m.wm_bound = coupling * lambda_ph / (r * r);
  m.wc_estimate = lambda_a * lambda_b / (r * r * r);
  m.ratio = r / lambda_ph;
  return m;
}

NormalOrderCheck normal_order_check(const Species& species, double beta, const UnitSystem& units,
                                    const FormFactor& g, int q, double rel_tol) {
  if (!(g.k_cut > 0) || !std::isfinite(g.k_cut)) throw DomainError("normal_order_check: finite k_cut required");
  const double hbar = units.hbar, c = units.c, e2 = species.charge * species.charge,
               m = species.mass;
  NormalOrderCheck out;
  // int d^3k/(2pi)^3 g^2 / k = k_cut^2 / (4 pi^2) for both form-factor conventions.
  out.d_gamma = 2.0 * kPi * hbar * e2 / (m * c) * g.k_cut * g.k_cut / (4.0 * kPi * kPi);
  out.expected = beta * q * out.d_gamma;
  if (e2 == 0.0) return out;

  const double k_end = g.kind == FormFactorKind::sharp ? g.k_cut : 10.0 * g.k_cut;
  auto f = [&](double k) {
    const double w = form_factor(g, k), x = beta * hbar * c * k;
    const double s = k * w * w / (2.0 * kPi * kPi);
    return std::array<double, 2>{s * covariance_even(x, 0.0, EqualTime::continuous),
                                 s * covariance_even(x, 0.0, EqualTime::discontinuous)};
  };
  quad::AdaptiveOptions opt;
  opt.driving = 2;
  opt.initial_panels = 16;
  const auto res = quad::integrate<2>(f, 0.0, k_end, 0.0, rel_tol, opt);
  if (!res.converged) throw NumericError("normal_order_check: quadrature failed", res.error);
  const double pref = beta * q * 4.0 * kPi * hbar * e2 / (m * c);
  out.matched_continuous = pref * res.value[0];
  out.matched_discontinuous = pref * res.value[1];
  out.jump_term = out.matched_continuous - out.matched_discontinuous;
  out.gap = std::abs(out.jump_term - out.expected) / out.expected;
  return out;
}

}  // namespace loopqed
