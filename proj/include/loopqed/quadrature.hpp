#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace loopqed::quad {

/// Gauss-Legendre rule on [-1, 1] with a runtime node count.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

template <std::size_t N>
struct AdaptiveResult {
  std::array<double, N> value{};
  double error = 0.0;  // summed over the driving channels
  std::size_t intervals = 0;
  bool converged = false;
};

struct AdaptiveOptions {
  std::size_t max_intervals = 2000;
  std::size_t driving = 1;         // leading channels whose Kronrod error drives subdivision
  std::size_t initial_panels = 1;  // equal panels to start from (oscillatory integrands)
  int magnitude_channel = -1;      // if set, |value| of this channel also scales rel_tol
};

/// Adaptive G10-K21 quadrature of a vector-valued integrand on [a, b].
///
/// Channels past `driving` ride along on the same nodes (auxiliary estimates that must
/// share the partition). Stops when error <= max(abs_tol, rel_tol * scale), scale being the
/// largest |value| among driving channels and the magnitude channel.
template <std::size_t N, class F>
AdaptiveResult<N> integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                            const AdaptiveOptions& opt) {
  const std::size_t max_intervals = opt.max_intervals, driving = opt.driving;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& x = Rule::abscissa();
  const auto& wk = Rule::weights();
  const auto& wg = Gauss::weights();

  struct Panel {
    double lo, hi;
    std::array<double, N> value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };

  auto apply = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::array<double, N> kron{}, gauss{};
    auto add = [&](const std::array<double, N>& v, double k_w, double g_w) {
      for (std::size_t c = 0; c < N; ++c) {
        kron[c] += k_w * v[c];
        gauss[c] += g_w * v[c];
      }
    };
    add(f(mid), wk[0], 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double gw = (i % 2 == 1) ? wg[i / 2] : 0.0;
      add(f(mid + half * x[i]), wk[i], gw);
      add(f(mid - half * x[i]), wk[i], gw);
    }
    Panel p{lo, hi, {}, 0.0};
    for (std::size_t c = 0; c < N; ++c) p.value[c] = half * kron[c];
    p.error = 0.0;
    for (std::size_t c = 0; c < driving; ++c) p.error += std::abs(half * (kron[c] - gauss[c]));
    return p;
  };

  std::priority_queue<Panel> heap;
  const std::size_t panels = std::max<std::size_t>(1, opt.initial_panels);
  std::array<double, N> value{};
  double error = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + (b - a) * i / panels;
    const double hi = i + 1 == panels ? b : a + (b - a) * (i + 1) / panels;
    Panel p = apply(lo, hi);
    for (std::size_t c = 0; c < N; ++c) value[c] += p.value[c];
    error += p.error;
    heap.push(p);
  }
  AdaptiveResult<N> out;
  auto totals = [&] {
    std::array<double, N> v{};
    double err = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      const auto& p = copy.top();
      for (std::size_t c = 0; c < N; ++c) v[c] += p.value[c];
      err += p.error;
      copy.pop();
    }
    return std::pair{v, err};
  };

  auto scale_of = [&](const std::array<double, N>& v) {
    double m = 0.0;
    for (std::size_t c = 0; c < driving; ++c) m = std::max(m, std::abs(v[c]));
    if (opt.magnitude_channel >= 0) m = std::max(m, std::abs(v[opt.magnitude_channel]));
    return m;
  };
  while (true) {
    if (error <= std::max(abs_tol, rel_tol * scale_of(value))) {
      out.converged = true;
      break;
    }
    if (heap.size() >= max_intervals) break;
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {  // interval exhausted in floating point
      heap.push(worst);
      break;
    }
    Panel left = apply(worst.lo, mid), right = apply(mid, worst.hi);
    for (std::size_t c = 0; c < N; ++c) value[c] += left.value[c] + right.value[c] - worst.value[c];
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  auto [v, err] = totals();  // resum in one pass to shed drift from incremental updates
  out.value = v;
  out.error = err;
  out.intervals = heap.size();
  if (!out.converged) out.converged = err <= std::max(abs_tol, rel_tol * scale_of(v));
  return out;
}

template <std::size_t N, class F>
AdaptiveResult<N> integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                            std::size_t max_intervals = 2000, std::size_t driving = 1) {
  AdaptiveOptions opt;
  opt.max_intervals = max_intervals;
  opt.driving = driving;
  return integrate<N>(std::forward<F>(f), a, b, abs_tol, rel_tol, opt);
}

/// Scalar convenience wrapper.
template <class F>
AdaptiveResult<1> integrate_scalar(F&& f, double a, double b, double abs_tol, double rel_tol,
                                   std::size_t max_intervals = 2000) {
  return integrate<1>([&](double t) { return std::array<double, 1>{f(t)}; }, a, b, abs_tol,
                      rel_tol, max_intervals);
}

/// Integral over [a, inf) via the map t = a + s / (1 - s).
template <class F>
AdaptiveResult<1> integrate_to_infinity(F&& f, double a, double abs_tol, double rel_tol,
                                        std::size_t max_intervals = 2000) {
  return integrate_scalar(
      [&](double s) {
        if (s >= 1.0) return 0.0;
        const double one_minus = 1.0 - s;
        return f(a + s / one_minus) / (one_minus * one_minus);
      },
      0.0, 1.0, abs_tol, rel_tol, max_intervals);
}

}  // namespace loopqed::quad
