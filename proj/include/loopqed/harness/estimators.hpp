#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "loopqed/asymptotics.hpp"
#include "loopqed/harness/config.hpp"

namespace loopqed::harness {

enum class Execution { parallel, serial };

struct EstimateRecord {
  std::string quantity;
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t N = 0;
  int M = 0;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;
  double r = std::numeric_limits<double>::quiet_NaN();
  double reference = std::numeric_limits<double>::quiet_NaN();  // oracle / deterministic value
  double quadrature_error = 0.0;
  double discretization_error = 0.0;
  std::size_t failures = 0;

  /// quadrature + discretization + 3 SE.
  double tolerance() const { return quadrature_error + discretization_error + 3.0 * standard_error; }
};

struct SampleStats {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error, accumulated in index order.
SampleStats summarize(std::span<const double> values);
/// Column `col` of a row-major table with `width` columns.
SampleStats summarize(std::span<const double> table, std::size_t width, std::size_t col);

/// Runs f(i, row) for i < n, where row is the i-th slice of width `width` of the result.
/// Each sample writes only its own row, so the table does not depend on the schedule.
/// The exception of the lowest failing index is rethrown after the loop.
template <class F>
std::vector<double> map_samples(std::size_t n, std::size_t width, F&& f, Execution exec) {
  std::vector<double> table(n * width, 0.0);
  std::vector<std::exception_ptr> errors(n);
  auto body = [&](std::size_t i) {
    try {
      f(i, std::span<double>(table.data() + i * width, width));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto count = static_cast<long long>(n);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return table;
}

/// Separation vector used by the estimators: |r| along a fixed, non-axial direction.
Vec3 separation(double r);

/// <W_c^2> over bridge pairs at M slices. Paths are drawn at 2M and coarsened, and the
/// M vs 2M difference is the discretization estimate. reference = lambda_a^2 lambda_b^2 / 120 r^6.
EstimateRecord estimate_wc_sq(const ExperimentConfig& cfg, Execution exec = Execution::parallel);

/// Sub-photon estimators at r = r_grid.front(), dipole limit, spectral loops.
struct WmSqEstimate {
  EstimateRecord wm_sq;  // reference: coupling^2 F(lambda_ph / r) / r^2
  EstimateRecord wc_sq;  // same samples; reference lambda_a^2 lambda_b^2 / 120 r^6
  EstimateRecord ratio;  // <W_m^2>/<W_c^2>, reference 120 A (r / lambda_ph)^3
  double deterministic_ratio = 0.0;  // 120 F r^4 / lambda_ph^4 (finite-x pipeline)
  int modes = 0;
};
WmSqEstimate estimate_wm_sq(const ExperimentConfig& cfg, Execution exec = Execution::parallel);

/// Mode count used by the spectral estimators: max(64, 4 lambda_ph / r).
int spectral_modes(double x);

/// One TailReport per r-grid point, on common random samples (grid paths for W_c and the
/// small-k correction; spectral loops for the full dipole-limit W_m).
std::vector<TailReport> run_cancellation_scan(const ExperimentConfig& cfg,
                                              Execution exec = Execution::parallel);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace loopqed::harness
