#include "loopqed/constant_a.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "loopqed/error.hpp"
#include "loopqed/quadrature.hpp"

namespace loopqed {

namespace {
constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// Tensors of the form s delta + v zhat zhat, contracted explicitly as 3x3 matrices.
Mat3 axial(double s, double v) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i) m[i][i] = s;
  m[2][2] += v;
  return m;
}

double contract(const Mat3& a, const Mat3& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a[i][j] * b[i][j];
  return s;
}

// From angular moments of e^{i q.rhat}: <1> = j0, <qhat qhat> = (j0 + j2)/3 delta - j2 rhat rhat.
// Given radial moments m0, m2 of j0, j2 (common prefactor c), returns the pair
// (scalar, qhat-qhat tensor); the transverse tensor is scalar * delta - qq.
struct Moments {
  double scalar;
  Mat3 qq;
  Mat3 transverse() const {
    Mat3 t = qq;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t[i][j] = (i == j ? scalar : 0.0) - qq[i][j];
    return t;
  }
};

Moments moments(double c, double m0, double m2) {
  return {c * m0, axial(c * (m0 + m2) / 3.0, -c * m2)};
}

// Integrand pair (first-principles, alternative) for one factorized tensor.
std::array<double, 2> contractions(const Moments& m) {
  const Mat3 p = m.transverse();
  return {contract(p, p), contract(m.qq, m.qq) - 3.0 * m.scalar * m.scalar};
}

// I_l(b) = int_0^inf j_l(q) / (q^2 + b^2) dq. Panels on [0, Q], then the tail rotated onto
// Q + i s where the integrand decays like e^{-s}: j_l(q) = Im[e^{iq} phi_l(q)].
std::array<double, 2> inverse_moments(double b, double rel_tol) {
  const double Q = 4.0 * kPi + b;
  auto f = [&](double q) {
    const double w = 1.0 / (q * q + b * b);
    return std::array<double, 2>{std::sph_bessel(0, q) * w, std::sph_bessel(2, q) * w};
  };
  quad::AdaptiveOptions opt;
  opt.driving = 2;
  opt.initial_panels = static_cast<std::size_t>(std::ceil(Q / kPi));
  opt.max_intervals = 20000;
  const auto head = quad::integrate<2>(f, 0.0, Q, 1e-16, rel_tol, opt);
  auto tail_f = [&](double s) {
    const cplx q(Q, s);
    const cplx w = 1.0 / (q * q + b * b);
    const cplx e = std::exp(cplx(0.0, 1.0) * q);
    const cplx phi0 = 1.0 / q;
    const cplx phi2 = 3.0 / (q * q * q) - 1.0 / q - cplx(0.0, 3.0) / (q * q);
    const cplx i(0.0, 1.0);
    return std::array<double, 2>{std::imag(i * e * phi0 * w), std::imag(i * e * phi2 * w)};
  };
  quad::AdaptiveOptions topt;
  topt.driving = 2;
  topt.initial_panels = 4;
  const auto tail = quad::integrate<2>(tail_f, 0.0, 60.0, 1e-18, rel_tol, topt);
  if (!head.converged || !tail.converged)
    throw NumericError("constant_A: radial moment quadrature failed", head.error + tail.error);
  return {head.value[0] + tail.value[0], head.value[1] + tail.value[1]};
}

RouteValue as_route(double v, double e) { return {v, e}; }

std::pair<RouteValue, RouteValue> t_route(const QuadSpec& qs) {
  // A = (1/2) int dt M(t) : M(t), M = (2/pi) [transverse tensor of L_0, L_2].
  auto f = [](double t) {
    const auto m = moments(2.0 / kPi, single_q_transform0(t), single_q_transform2(t));
    const auto c = contractions(m);
    return std::array<double, 2>{0.5 * c[0], 0.5 * c[1]};
  };
  // Map [0, inf) to [0, 1): t = s / (1 - s).
  auto g = [&](double s) {
    if (s >= 1.0) return std::array<double, 2>{0.0, 0.0};
    const double om = 1.0 - s, jac = 1.0 / (om * om);
    auto v = f(s / om);
    return std::array<double, 2>{v[0] * jac, v[1] * jac};
  };
  quad::AdaptiveOptions opt;
  opt.driving = 2;
  opt.initial_panels = 4;
  const auto res = quad::integrate<2>(g, 0.0, 1.0, qs.t_abs_tol, qs.t_rel_tol, opt);
  if (!res.converged) throw NumericError("constant_A: t-integral did not converge", res.error);
  return {as_route(res.value[0], res.error), as_route(res.value[1], res.error)};
}

std::pair<RouteValue, RouteValue> b_route(const QuadSpec& qs, double inner_tol) {
  // A = (1/pi) int db K(b) : K(b), K = (2/pi) [transverse tensor of R_0, R_2],
  // R_l(b) = int q^2 j_l / (q^2 + b^2) = int j_l - b^2 I_l(b). Beyond B, K : K = 6 / b^4
  // up to e^{-b}, for both tensor factors.
  constexpr double B = 200.0;
  auto f = [&](double b) {
    const auto I = inverse_moments(b, inner_tol);
    const double r0 = 0.5 * kPi - b * b * I[0], r2 = 0.25 * kPi - b * b * I[1];
    const auto c = contractions(moments(2.0 / kPi, r0, r2));
    return std::array<double, 2>{c[0] / kPi, c[1] / kPi};
  };
  quad::AdaptiveOptions opt;
  opt.driving = 2;
  opt.initial_panels = 16;
  const auto res = quad::integrate<2>(f, 0.0, B, qs.t_abs_tol, qs.t_rel_tol, opt);
  if (!res.converged) throw NumericError("constant_A: b-integral did not converge", res.error);
  const double tail = 6.0 / kPi / (3.0 * B * B * B);
  return {as_route(res.value[0] + tail, res.error), as_route(res.value[1] + tail, res.error)};
}

}  // namespace

double single_q_transform0(double t) { return 1.0 / (1.0 + t * t); }

double single_q_transform2(double t) {
  if (t > 4.0) {
    // sum_{k >= 2} (-1)^{k+1} t^{-2k} (3/(2k+1) - 1), avoiding the cancellation.
    const double u = 1.0 / (t * t);
    double term = u, sum = 0.0;
    for (int k = 1; k <= 30; ++k, term *= -u) sum += term * (3.0 / (2 * k + 1) - 1.0);
    return sum;
  }
  return 3.0 * (1.0 - t * std::atan2(1.0, t)) - 1.0 / (1.0 + t * t);
}

double single_q_transform_numeric(int l, double t) {
  if (!(t > 0)) throw DomainError("single_q_transform_numeric: t must be positive");
  const double end = 80.0 / t + 40.0;
  auto f = [&](double q) { return std::array<double, 1>{q * std::sph_bessel(l, q) * std::exp(-t * q)}; };
  quad::AdaptiveOptions opt;
  opt.initial_panels = static_cast<std::size_t>(std::ceil(end / kPi));
  opt.max_intervals = 50000;
  return quad::integrate<1>(f, 0.0, end, 1e-15, 1e-13, opt).value[0];
}

double transverse_contraction(const Vec3& q1, const Vec3& q2) {
  auto projector = [](const Vec3& q) {
    const double n2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    if (n2 == 0.0) throw DomainError("transverse_contraction: zero wave vector");
    Mat3 p{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p[i][j] = (i == j ? 1.0 : 0.0) - q[i] * q[j] / n2;
    return p;
  };
  return contract(projector(q1), projector(q2));
}

ConstantA compute_constant_A(const QuadSpec& quad) {
  quad.validate();
  ConstantA a;
  auto [t, t_alt] = t_route(quad);
  // Inner radial moments at two accuracies; their spread is part of the b-route error bar.
  auto [b, b_alt] = b_route(quad, 1e-11);
  auto [b2, b2_alt] = b_route(quad, 1e-13);
  b2.error += std::abs(b2.value - b.value);
  b2_alt.error += std::abs(b2_alt.value - b_alt.value);
  a.t_route = t;
  a.t_route_alt = t_alt;
  a.b_route = b2;
  a.b_route_alt = b2_alt;
  a.value = t.value;
  a.error = t.error;
  a.routes_agree = std::abs(t.value - b2.value) <= t.error + b2.error &&
                   std::abs(t_alt.value - b2_alt.value) <= t_alt.error + b2_alt.error;
  a.fingerprint = quad.fingerprint();
  return a;
}

ConstantA constant_A(const QuadSpec& quad) {
  static std::mutex mu;
  static std::map<std::uint64_t, ConstantA> cache;
  const auto key = quad.fingerprint();
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  ConstantA a = compute_constant_A(quad);
  std::lock_guard lock(mu);
  cache.emplace(key, a);
  return a;
}

}  // namespace loopqed
