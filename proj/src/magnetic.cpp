#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "loopqed/error.hpp"
#include "loopqed/kernels.hpp"
#include "loopqed/potentials.hpp"
#include "loopqed/quadrature.hpp"

namespace loopqed {

using cplx = std::complex<double>;

std::complex<double> toeplitz_q_sum(std::span<const cplx> x, std::span<const cplx> y, double u,
                                    ToeplitzMethod method) {
  const std::size_t M = x.size();
  if (y.size() != M || M == 0) throw DomainError("toeplitz_q_sum: size mismatch");
  if (method == ToeplitzMethod::reference) {
    cplx s = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      cplx row = 0.0;
      for (std::size_t mp = 0; mp < M; ++mp)
        row += y[mp] * q_kernel(u, (static_cast<double>(m) - static_cast<double>(mp)) / M);
      s += x[m] * row;
    }
    return s;
  }
  // Q(d / M) = C (rho^d + rho^{M - d}), 0 <= d < M.
  const double rho = u == 0.0 ? 1.0 : std::exp(-u / M);
  const double C = u == 0.0 ? 0.5 : 0.5 * u / (-std::expm1(-u));
  std::vector<double> pw(M + 1);
  pw[0] = 1.0;
  for (std::size_t k = 1; k <= M; ++k) pw[k] = pw[k - 1] * rho;

  cplx near = 0.0, wrap = 0.0;
  // rho^{|m - m'|}: forward prefix (m' <= m) and backward suffix (m' > m).
  cplx f = 0.0, p = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    f = rho * f + y[m];
    p += y[m] * pw[m];
    near += x[m] * f;
    wrap += x[m] * (pw[M - m] * p);  // rho^{M - (m - m')} = rho^{M - m} rho^{m'}
  }
  cplx g = 0.0, rsum = 0.0;
  for (std::size_t m = M; m-- > 0;) {
    near += x[m] * g;
    wrap += x[m] * (pw[m] * rsum);  // rho^{M - (m' - m)} = rho^m rho^{M - m'}
    g = rho * (g + y[m]);
    rsum += y[m] * pw[M - m];
  }
  return C * (near + wrap);
}

namespace {

constexpr double kPi = std::numbers::pi;

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Orthonormal frame with e3 along r. e1 depends only on the line through r, so the frame
// of -r is (e1, -e2, -e3) and the angular node set maps onto itself under k -> -k.
struct Frame {
  Vec3 e1, e2, e3;
};

Frame frame_for(const Vec3& r) {
  const double rn = norm(r);
  Frame f;
  f.e3 = rn > 0 ? Vec3{r[0] / rn, r[1] / rn, r[2] / rn} : Vec3{0, 0, 1};
  int axis = 0;
  for (int c = 1; c < 3; ++c)
    if (std::abs(f.e3[c]) < std::abs(f.e3[axis])) axis = c;
  Vec3 h{0, 0, 0};
  h[axis] = 1.0;
  const double hd = dot(h, f.e3);
  Vec3 e1{h[0] - hd * f.e3[0], h[1] - hd * f.e3[1], h[2] - hd * f.e3[2]};
  const double n1 = norm(e1);
  f.e1 = {e1[0] / n1, e1[1] / n1, e1[2] / n1};
  f.e2 = {f.e3[1] * f.e1[2] - f.e3[2] * f.e1[1], f.e3[2] * f.e1[0] - f.e3[0] * f.e1[2],
          f.e3[0] * f.e1[1] - f.e3[1] * f.e1[0]};
  return f;
}

struct AngularNode {
  Vec3 khat;
  double cos_theta;
  double weight;
};

std::vector<AngularNode> sphere_rule(const Frame& fr, int n_theta, int n_phi) {
  const auto gl = quad::gauss_legendre(n_theta);
  std::vector<AngularNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl.nodes[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * kPi * j / n_phi;
      const double cp = std::cos(phi), sp = std::sin(phi);
      AngularNode n;
      for (int c = 0; c < 3; ++c) n.khat[c] = st * cp * fr.e1[c] + st * sp * fr.e2[c] + ct * fr.e3[c];
      n.cos_theta = ct;
      n.weight = gl.weights[i] * 2.0 * kPi / n_phi;
      nodes.push_back(n);
    }
  }
  return nodes;
}

double max_extent(const LoopShape& s) {
  double m = 0.0;
  for (const auto& p : s.X) m = std::max(m, norm(p));
  return m;
}

// Shared radial/angular driver. `contract(k, khat)` returns P:J at wave vector k khat.
template <class Contract>
MagneticResult integrate_k_space(const PairContext& ctx, Contract&& contract, bool throw_on_failure) {
  if (!ctx.a || !ctx.b) throw DomainError("w_magnetic: missing loops");
  ctx.quad.validate();
  const QuadSpec& qs = ctx.quad;
  const Frame fr = frame_for(ctx.r);
  const double rn = norm(ctx.r);
  const auto fine = sphere_rule(fr, qs.polar_nodes, qs.azimuth_nodes);
  const auto coarse =
      sphere_rule(fr, std::max(1, qs.polar_nodes / 2), std::max(1, qs.azimuth_nodes / 2));
  const double k_max = ctx.g.support_end(qs.k_max_factor);
  const double pref = 4.0 * kPi / ((2.0 * kPi) * (2.0 * kPi) * (2.0 * kPi));

  auto integrand = [&](double k) {
    const double g = form_factor(ctx.g, k);
    std::array<double, 3> out{0, 0, 0};
    if (g == 0.0) return out;
    auto angular = [&](const std::vector<AngularNode>& nodes, bool with_magnitude) {
      double sum = 0.0, mag = 0.0;
      for (const auto& n : nodes) {
        const cplx phase = std::polar(1.0, k * rn * n.cos_theta);
        const double v = std::real(phase * contract(k, n.khat));
        sum += n.weight * v;
        if (with_magnitude) mag += n.weight * std::abs(v);
      }
      return std::pair{sum, mag};
    };
    const auto [full, mag] = angular(fine, true);
    const double c = angular(coarse, false).first;
    const double s = pref * g * g;
    out = {s * full, s * c, s * mag};
    return out;
  };

  const double L = rn + ctx.lambda_a * max_extent(*ctx.a) + ctx.lambda_b * max_extent(*ctx.b);
  quad::AdaptiveOptions opt;
  opt.max_intervals = qs.radial_max_intervals;
  opt.initial_panels =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(k_max * L / kPi)), 1, 64);
  opt.magnitude_channel = 2;
  const auto res = quad::integrate<3>(integrand, 0.0, k_max, qs.radial_abs_tol, qs.radial_rel_tol, opt);

  MagneticResult out;
  out.integral = res.value[0];
  out.angular_error = std::abs(res.value[0] - res.value[1]);
  out.error = res.error + out.angular_error;
  out.converged = res.converged;
  out.value = ctx.coupling * out.integral;
  if (!res.converged && throw_on_failure)
    throw NumericError("w_magnetic: radial quadrature did not reach tolerance", res.error);
  return out;
}

struct LoopGeometry {
  int M;
  std::vector<Vec3> dx, mid;
};

LoopGeometry geometry(const LoopShape& s) {
  LoopGeometry g{s.M, {}, {}};
  g.dx.reserve(s.steps());
  g.mid.reserve(s.steps());
  for (std::size_t j = 0; j < s.steps(); ++j) {
    g.dx.push_back(s.increment(j));
    g.mid.push_back(s.midpoint(j));
  }
  return g;
}

// Folded current amplitudes A_m^mu = sum_{j = m mod M} dX_j^mu e^{i sign k lambda khat.Xbar_j}.
void fold_currents(const LoopGeometry& g, double k, double lambda, double sign, const Vec3& khat,
                   std::array<std::vector<cplx>, 3>& out, std::vector<cplx>& along) {
  for (auto& v : out) v.assign(g.M, cplx{});
  along.assign(g.M, cplx{});
  for (std::size_t j = 0; j < g.dx.size(); ++j) {
    const cplx e = std::polar(1.0, sign * k * lambda * dot(khat, g.mid[j]));
    const std::size_t m = j % g.M;
    for (int c = 0; c < 3; ++c) out[c][m] += g.dx[j][c] * e;
    along[m] += dot(khat, g.dx[j]) * e;
  }
}

}  // namespace

MagneticResult w_magnetic(const PairContext& ctx, const MagneticOptions& opt) {
  if (!ctx.a || !ctx.b) throw DomainError("w_magnetic: missing loops");
  if (ctx.a->M != ctx.b->M) throw DomainError("w_magnetic: loops must share the time grid");
  const LoopGeometry ga = geometry(*ctx.a), gb = geometry(*ctx.b);
  auto contract = [&, ax = std::array<std::vector<cplx>, 3>{}, bx = std::array<std::vector<cplx>, 3>{},
                   al = std::vector<cplx>{}, bl = std::vector<cplx>{}](double k, const Vec3& khat) mutable {
    fold_currents(ga, k, ctx.lambda_a, -1.0, khat, ax, al);
    fold_currents(gb, k, ctx.lambda_b, +1.0, khat, bx, bl);
    const double u = ctx.lambda_ph * k;
    cplx trace = 0.0, longitudinal = 0.0;
    if (opt.projector != Projector::longitudinal)
      for (int c = 0; c < 3; ++c) trace += toeplitz_q_sum(ax[c], bx[c], u, opt.method);
    if (opt.projector != Projector::identity) longitudinal = toeplitz_q_sum(al, bl, u, opt.method);
    switch (opt.projector) {
      case Projector::transverse: return trace - longitudinal;
      case Projector::longitudinal: return longitudinal;
      case Projector::identity: return trace;
    }
    return trace;
  };
  return integrate_k_space(ctx, contract, opt.throw_on_failure);
}

MagneticResult w_magnetic_classical(const PairContext& ctx) {
  if (!ctx.a || !ctx.b) throw DomainError("w_magnetic_classical: missing loops");
  const LoopGeometry ga = geometry(*ctx.a), gb = geometry(*ctx.b);
  auto line = [](const LoopGeometry& g, double k, double lambda, double sign, const Vec3& khat) {
    std::array<cplx, 3> v{};
    for (std::size_t j = 0; j < g.dx.size(); ++j) {
      const cplx e = std::exp(cplx(0.0, sign * k * lambda * dot(khat, g.mid[j])));
      for (int c = 0; c < 3; ++c) v[c] += g.dx[j][c] * e;
    }
    return v;
  };
  auto contract = [&](double k, const Vec3& khat) {
    const auto A = line(ga, k, ctx.lambda_a, -1.0, khat);
    const auto B = line(gb, k, ctx.lambda_b, +1.0, khat);
    cplx ab = 0.0, ka = 0.0, kb = 0.0;
    for (int c = 0; c < 3; ++c) {
      ab += A[c] * B[c];
      ka += khat[c] * A[c];
      kb += khat[c] * B[c];
    }
    return ab - ka * kb;
  };
  return integrate_k_space(ctx, contract, true);
}

}  // namespace loopqed
