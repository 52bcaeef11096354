#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace loopqed {

using Vec3 = std::array<double, 3>;

/// Discretized closed Brownian loop X(tau), tau_j = j / M, j = 0..q M, X(0) = X(q) = 0.
struct LoopShape {
  int q = 1;
  int M = 64;
  std::vector<Vec3> X;

  std::size_t steps() const { return static_cast<std::size_t>(q) * M; }
  double dtau() const { return 1.0 / M; }
  Vec3 increment(std::size_t j) const;
  Vec3 midpoint(std::size_t j) const;

  /// The degenerate loop X = 0 (a point particle).
  static LoopShape frozen(int q, int M);
};

/// A q = 1 loop attached to a point in space.
struct Filament {
  Vec3 anchor{};
  std::string species;
  LoopShape shape;
};

/// Brownian bridge: free increments with variance 1/M per component, minus the
/// linear drift (tau / q) X_free(q). Exact finite-M law of the continuum bridge.
LoopShape sample_bridge(int q, int M, std::mt19937_64& engine);
LoopShape sample_bridge(int q, int M, std::uint64_t seed, std::uint64_t index = 0);

/// Keeps every factor-th grid point: the same continuum path seen at M / factor slices.
LoopShape coarsen(const LoopShape& shape, int factor);

/// Per-component covariance <X(t) X(t')> = q [min(t/q, t'/q) - t t'/q^2].
double covariance_oracle(int q, double t, double tp);

/// Covariances of differentials, as a continuous coefficient plus the weight of a
/// delta(t - t') atom. theta(0) = 1/2 (midpoint rule).
struct DiffCovariance {
  double regular = 0.0;
  double delta_weight = 0.0;
};

enum class DiffPair {
  dX_X,   // <dX(t) X(t')> / dt = theta(t' - t) - t'/q
  dX_dX,  // <dX(t) dX(t')> / (dt dt')
};

DiffCovariance diff_covariance_oracle(DiffPair pair, int q, double t, double tp);

using VectorField = std::function<Vec3(const Vec3&)>;

/// Sum_j (X_{j+1} - X_j) . f((X_j + X_{j+1}) / 2).
double line_integral_midpoint(const LoopShape& shape, const VectorField& f);

/// Exact finite-M variance of the signed-area integral
/// (1/2) sum_j [mid_j^x dX_j^y - mid_j^y dX_j^x] over the bridge ensemble,
/// by Wick contraction of the discrete grid covariances.
double signed_area_variance_oracle(int q, int M);

}  // namespace loopqed
