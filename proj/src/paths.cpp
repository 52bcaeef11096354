#include "loopqed/paths.hpp"

#include <algorithm>
#include <cmath>

#include "loopqed/error.hpp"
#include "loopqed/rng.hpp"

namespace loopqed {

Vec3 LoopShape::increment(std::size_t j) const {
  return {X[j + 1][0] - X[j][0], X[j + 1][1] - X[j][1], X[j + 1][2] - X[j][2]};
}

Vec3 LoopShape::midpoint(std::size_t j) const {
  return {0.5 * (X[j + 1][0] + X[j][0]), 0.5 * (X[j + 1][1] + X[j][1]),
          0.5 * (X[j + 1][2] + X[j][2])};
}

LoopShape LoopShape::frozen(int q, int M) {
  LoopShape s;
  s.q = q;
  s.M = M;
  s.X.assign(s.steps() + 1, Vec3{0, 0, 0});
  return s;
}

LoopShape sample_bridge(int q, int M, std::mt19937_64& engine) {
  if (q < 1 || M < 2) throw DomainError("sample_bridge: need q >= 1 and M >= 2");
  LoopShape s = LoopShape::frozen(q, M);
  const std::size_t n = s.steps();
  std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / M));
  for (std::size_t j = 1; j <= n; ++j)
    for (int c = 0; c < 3; ++c) s.X[j][c] = s.X[j - 1][c] + normal(engine);
  const Vec3 end = s.X[n];
  for (std::size_t j = 1; j < n; ++j) {
    const double f = static_cast<double>(j) / n;
    for (int c = 0; c < 3; ++c) s.X[j][c] -= f * end[c];
  }
  s.X[n] = {0, 0, 0};
  return s;
}

LoopShape sample_bridge(int q, int M, std::uint64_t seed, std::uint64_t index) {
  auto engine = sample_engine(seed, index);
  return sample_bridge(q, M, engine);
}

LoopShape coarsen(const LoopShape& shape, int factor) {
  if (factor < 1 || shape.M % factor != 0)
    throw DomainError("coarsening factor must divide the slice count");
  LoopShape out;
  out.q = shape.q;
  out.M = shape.M / factor;
  out.X.reserve(out.steps() + 1);
  for (std::size_t j = 0; j <= shape.steps(); j += static_cast<std::size_t>(factor))
    out.X.push_back(shape.X[j]);
  return out;
}

namespace {
void check_times(int q, double t, double tp) {
  if (q < 1) throw DomainError("winding number must be >= 1");
  if (t < 0 || tp < 0 || t > q || tp > q) throw DomainError("time outside [0, q]");
}
}  // namespace

double covariance_oracle(int q, double t, double tp) {
  check_times(q, t, tp);
  return std::min(t, tp) - t * tp / q;
}

DiffCovariance diff_covariance_oracle(DiffPair pair, int q, double t, double tp) {
  check_times(q, t, tp);
  if (pair == DiffPair::dX_dX) return {-1.0 / q, 1.0};
  // d/dt [min(t, t') - t t'/q] = theta(t' - t) - t'/q; theta(0) = 1/2.
  const double theta = t < tp ? 1.0 : (t > tp ? 0.0 : 0.5);
  return {theta - tp / q, 0.0};
}

double line_integral_midpoint(const LoopShape& shape, const VectorField& f) {
  double sum = 0.0;
  for (std::size_t j = 0; j < shape.steps(); ++j) {
    const Vec3 d = shape.increment(j);
    const Vec3 v = f(shape.midpoint(j));
    sum += d[0] * v[0] + d[1] * v[1] + d[2] * v[2];
  }
  return sum;
}

double signed_area_variance_oracle(int q, int M) {
  const std::size_t n = static_cast<std::size_t>(q) * M;
  auto g = [&](std::size_t i, std::size_t k) {
    return covariance_oracle(q, static_cast<double>(i) / M, static_cast<double>(k) / M);
  };
  // mid_j = (X_j + X_{j+1}) / 2, d_j = X_{j+1} - X_j; all covariances are per component.
  auto mm = [&](std::size_t j, std::size_t l) {
    return 0.25 * (g(j, l) + g(j, l + 1) + g(j + 1, l) + g(j + 1, l + 1));
  };
  auto dd = [&](std::size_t j, std::size_t l) {
    return g(j + 1, l + 1) - g(j + 1, l) - g(j, l + 1) + g(j, l);
  };
  auto md = [&](std::size_t j, std::size_t l) {
    return 0.5 * (g(j, l + 1) - g(j, l) + g(j + 1, l + 1) - g(j + 1, l));
  };
  // Var = (1/4) sum_{jl} 2 [mm dd - md(j,l) md(l,j)]
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) sum += mm(j, l) * dd(j, l) - md(j, l) * md(l, j);
  return 0.5 * sum;
}

}  // namespace loopqed
