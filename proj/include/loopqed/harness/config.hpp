#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "loopqed/potentials.hpp"
#include "loopqed/scales.hpp"

namespace loopqed::harness {

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"kernels-suite", "bridge-suite", "wc2", "wm2",
                                              "cancellation-scan", "constant-A", "normal-order"};
  return names;
}

/// Length scales of a pair in a common unit (the unit of the r-grid).
struct PairScales {
  double lambda_a = 1e-3;
  double lambda_b = 1e-3;
  double lambda_ph = 100.0;
  double lambda_cut = 1e-4;
};

struct PhysicalInput {
  double beta = 1.0;
  UnitSystem units;
  std::vector<Species> species;
  std::string species_a, species_b;
  double reference_mass = 0.0;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  int slices = 64;
  std::string out_dir = ".";
  PairScales scales;
  std::optional<PhysicalInput> physical;  // when present, scales are derived from it
  FormFactorKind form_factor = FormFactorKind::gaussian;
  QuadSpec quad;
  std::vector<double> r_grid{1.0};
  RegimeThresholds thresholds;
  int winding = 1;  // q for the normal-order check
  /// Flat "section.key" -> value map after overrides; the fingerprint is taken over it.
  std::map<std::string, std::string> entries;
  std::uint64_t fingerprint = 0;

  FormFactor form() const { return {form_factor, 1.0 / scales.lambda_cut}; }
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<int> slices;
  std::optional<std::string> out_dir;
  std::optional<std::string> experiment;
};

/// Parses an INI file (sections: run, scales, physical, quadrature, scan, thresholds),
/// applies overrides and validates everything. Throws ConfigError; never writes files.
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});
ExperimentConfig parse_config(const std::string& ini_text, const Overrides& overrides = {});

/// FNV-1a over "key=value\n" for the sorted keys: independent of the order in the file.
std::uint64_t fingerprint_entries(const std::map<std::string, std::string>& entries);

std::string hex(std::uint64_t v);

}  // namespace loopqed::harness
