#include "loopqed/potentials.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "loopqed/error.hpp"

namespace loopqed {

namespace {
double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}
}  // namespace

void QuadSpec::validate() const {
  if (polar_nodes < 2 || azimuth_nodes < 2) throw DomainError("QuadSpec: node counts must be >= 2");
  if (!(radial_rel_tol > 0) || !(radial_abs_tol > 0) || !(t_rel_tol > 0) || !(t_abs_tol > 0))
    throw DomainError("QuadSpec: tolerances must be positive");
  if (radial_max_intervals < 1) throw DomainError("QuadSpec: radial_max_intervals must be >= 1");
  if (!(k_max_factor > 0)) throw DomainError("QuadSpec: k_max_factor must be positive");
}

std::uint64_t QuadSpec::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  fnv(h, &polar_nodes, sizeof polar_nodes);
  fnv(h, &azimuth_nodes, sizeof azimuth_nodes);
  fnv(h, &radial_rel_tol, sizeof radial_rel_tol);
  fnv(h, &radial_abs_tol, sizeof radial_abs_tol);
  const std::uint64_t mi = radial_max_intervals;
  fnv(h, &mi, sizeof mi);
  fnv(h, &k_max_factor, sizeof k_max_factor);
  fnv(h, &t_rel_tol, sizeof t_rel_tol);
  fnv(h, &t_abs_tol, sizeof t_abs_tol);
  return h;
}

PairContext make_pair_context(const ScaleSet& scales, const Filament& a, const Filament& b,
                              const FormFactor& g, const QuadSpec& quad) {
  PairContext ctx;
  ctx.a = &a.shape;
  ctx.b = &b.shape;
  for (int c = 0; c < 3; ++c) ctx.r[c] = a.anchor[c] - b.anchor[c];
  ctx.lambda_a = scales.lambda_of(a.species);
  ctx.lambda_b = scales.lambda_of(b.species);
  ctx.lambda_ph = scales.lambda_ph;
  const double ma = scales.species_of(a.species).mass, mb = scales.species_of(b.species).mass;
  const double c = scales.units.c;
  ctx.coupling = 1.0 / (scales.beta * std::sqrt(ma * mb) * c * c);
  ctx.g = g;
  ctx.quad = quad;
  return ctx;
}

// ---- Coulomb ----------------------------------------------------------------

CoulombValue coulomb_pair(const LoopShape& a, const Vec3& anchor_a, double lambda_a,
                          const LoopShape& b, const Vec3& anchor_b, double lambda_b, double eps) {
  if (a.M != b.M) throw DomainError("coulomb_pair: loops must share the time grid");
  const int M = a.M;
  const double floor_dist = eps * std::max(lambda_a, lambda_b);
  CoulombValue out;
  for (int m = 0; m < a.q; ++m)
    for (int mp = 0; mp < b.q; ++mp) {
      double sum = 0.0;
      for (int j = 0; j < M; ++j) {
        const Vec3& xa = a.X[m * M + j];
        const Vec3& xb = b.X[mp * M + j];
        Vec3 d;
        for (int c = 0; c < 3; ++c)
          d[c] = anchor_a[c] + lambda_a * xa[c] - anchor_b[c] - lambda_b * xb[c];
        double dist = norm(d);
        if (dist <= floor_dist || dist == 0.0) {
          if (floor_dist == 0.0) throw DomainError("coulomb_pair: coincident point charges");
          dist = floor_dist;
          out.regularized = true;
        }
        sum += 1.0 / dist;
      }
      out.value += sum / M;
    }
  return out;
}

CoulombValue self_energy(const LoopShape& loop, double lambda, double charge, double eps) {
  CoulombValue out;
  if (loop.q == 1) return out;
  const int M = loop.M;
  const double floor_dist = eps * lambda;
  for (int m = 0; m < loop.q; ++m)
    for (int mp = 0; mp < loop.q; ++mp) {
      if (m == mp) continue;
      double sum = 0.0;
      for (int j = 0; j < M; ++j) {
        const Vec3& x1 = loop.X[m * M + j];
        const Vec3& x2 = loop.X[mp * M + j];
        double dist = lambda * norm(Vec3{x1[0] - x2[0], x1[1] - x2[1], x1[2] - x2[2]});
        if (dist <= floor_dist) {
          if (floor_dist == 0.0) throw DomainError("self_energy: coincident point charges");
          dist = floor_dist;
          out.regularized = true;
        }
        sum += 1.0 / dist;
      }
      out.value += sum / M;
    }
  out.value *= 0.5 * charge * charge;
  return out;
}

// ---- Dipolar Coulomb tail ---------------------------------------------------

Mat3 dipole_overlap(const LoopShape& a, const LoopShape& b) {
  if (a.q != 1 || b.q != 1) throw DomainError("dipole_overlap: q = 1 filaments only");
  if (a.M != b.M) throw DomainError("dipole_overlap: loops must share the time grid");
  const int M = a.M;
  Mat3 prod{};
  Vec3 ma{}, mb{};
  for (int j = 0; j < M; ++j) {
    // delta atom on the diagonal cell, with xi taken at the cell midpoint
    const Vec3 xa = a.midpoint(j), xb = b.midpoint(j);
    for (int i = 0; i < 3; ++i) {
      ma[i] += xa[i];
      mb[i] += xb[i];
      for (int k = 0; k < 3; ++k) prod[i][k] += xa[i] * xb[k];
    }
  }
  Mat3 D{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) D[i][k] = prod[i][k] / M - (ma[i] / M) * (mb[k] / M);
  return D;
}

double w_coulomb_tail(const LoopShape& a, const LoopShape& b, const Vec3& r, double lambda_a,
                      double lambda_b) {
  const double rn = norm(r);
  if (rn == 0.0) throw DomainError("w_coulomb_tail: r = 0");
  const Mat3 D = dipole_overlap(a, b);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      s += D[i][k] * ((i == k ? 1.0 : 0.0) - 3.0 * r[i] * r[k] / (rn * rn));
  return lambda_a * lambda_b * s / (rn * rn * rn);
}

double w_coulomb_tail(const PairContext& ctx) {
  return w_coulomb_tail(*ctx.a, *ctx.b, ctx.r, ctx.lambda_a, ctx.lambda_b);
}

// ---- Gibbs weight -----------------------------------------------------------

GibbsResult gibbs_weight(std::span<const Loop> loops, double beta, double lambda_ph,
                         const FormFactor& g, const QuadSpec& quad, const ExternalPotential& v_ext) {
  GibbsResult out;
  if (loops.empty()) return out;
  if (!(lambda_ph > 0)) throw DomainError("gibbs_weight: lambda_ph must be positive");
  auto check = [](double v, const std::string& what) {
    if (!std::isfinite(v)) throw NumericError("gibbs_weight: non-finite " + what, v);
  };
  auto context = [&](const Loop& x, const Loop& y) {
    PairContext ctx;
    ctx.a = &x.shape;
    ctx.b = &y.shape;
    for (int c = 0; c < 3; ++c) ctx.r[c] = x.anchor[c] - y.anchor[c];
    ctx.lambda_a = x.lambda;
    ctx.lambda_b = y.lambda;
    ctx.lambda_ph = lambda_ph;
    ctx.coupling = magnetic_coupling(x.lambda, y.lambda, lambda_ph);
    ctx.g = g;
    ctx.quad = quad;
    return ctx;
  };
  // Frozen loops carry no current, so W_m vanishes without running the quadrature.
  auto carries_current = [](const Loop& x) {
    if (x.lambda == 0.0) return false;
    for (const auto& p : x.shape.X)
      if (p[0] != 0.0 || p[1] != 0.0 || p[2] != 0.0) return true;
    return false;
  };

  double energy = 0.0;
  for (std::size_t r = 0; r < loops.size(); ++r) {
    const Loop& x = loops[r];
    const auto u = self_energy(x.shape, x.lambda, x.charge);
    out.regularized |= u.regularized;
    check(u.value, "self energy of loop " + std::to_string(r));
    energy += u.value;
    if (carries_current(x)) {
      const double w = w_magnetic(context(x, x)).value;
      check(w, "W_m self term of loop " + std::to_string(r));
      energy += 0.5 * x.charge * x.charge * w;
    }
    if (v_ext) {
      const double v = v_ext(x);
      check(v, "external potential of loop " + std::to_string(r));
      energy += v;
    }
  }
  for (std::size_t r = 0; r < loops.size(); ++r)
    for (std::size_t s = r + 1; s < loops.size(); ++s) {
      const Loop &x = loops[r], &y = loops[s];
      const std::string tag = "pair (" + std::to_string(r) + ", " + std::to_string(s) + ")";
      const auto vc = coulomb_pair(x.shape, x.anchor, x.lambda, y.shape, y.anchor, y.lambda);
      out.regularized |= vc.regularized;
      check(vc.value, "Coulomb term of " + tag);
      energy += x.charge * y.charge * vc.value;
      if (carries_current(x) && carries_current(y)) {
        const double w = w_magnetic(context(x, y)).value;
        check(w, "W_m of " + tag);
        energy += x.charge * y.charge * w;
      }
    }
  out.exponent = -beta * energy;
  out.weight = std::exp(out.exponent);
  return out;
}

}  // namespace loopqed
