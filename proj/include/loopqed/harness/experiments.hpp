#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loopqed/harness/estimators.hpp"

namespace loopqed::harness {

inline constexpr const char* kVersion = "0.1.0";

/// One emitted row: an estimate or a deterministic check, with an optional verdict.
struct Row {
  EstimateRecord rec;
  double allowed = 0.0;  // fixed tolerance of a deterministic check, added to the budget
  std::optional<bool> pass;

  double tolerance() const { return allowed + rec.tolerance(); }
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Row> rows;
  std::string summary_json;  // experiment-specific summary object
  bool all_passed() const;
};

/// Runs one experiment. Throws NumericError / DomainError on numerical failure.
ExperimentResult run_experiment(const ExperimentConfig& cfg, Execution exec = Execution::parallel);

// Individual suites, also used by the acceptance driver.
ExperimentResult kernels_suite(const ExperimentConfig& cfg);
ExperimentResult bridge_suite(const ExperimentConfig& cfg, Execution exec);
ExperimentResult wc2_experiment(const ExperimentConfig& cfg, Execution exec);
ExperimentResult wm2_experiment(const ExperimentConfig& cfg, Execution exec);
ExperimentResult cancellation_experiment(const ExperimentConfig& cfg, Execution exec);
ExperimentResult constant_a_experiment(const ExperimentConfig& cfg);
ExperimentResult normal_order_experiment(const ExperimentConfig& cfg);

/// CSV text (header + one line per row, %.17g numbers).
std::string to_csv(const ExperimentConfig& cfg, const ExperimentResult& result);
/// JSON summary with the provenance block (seed, version, fingerprint, config).
std::string to_json(const ExperimentConfig& cfg, const ExperimentResult& result);

/// Writes <out>/<experiment>.csv and .json. Both are rendered before anything is written,
/// and each file appears via rename, so a failure leaves no partial file behind.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

}  // namespace loopqed::harness
