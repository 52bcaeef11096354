// loopqed <experiment> [--config PATH] [--seed S] [--samples N] [--slices M] [--out DIR]
// Exit codes: 0 success, 1 numeric (or I/O) failure, 2 usage/config error.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "loopqed/error.hpp"
#include "loopqed/harness/experiments.hpp"
#include "loopqed/parallel.hpp"

namespace h = loopqed::harness;

int main(int argc, char** argv) {
  // "run" is an optional verb: `loopqed run wc2` == `loopqed wc2`.
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args.front() == "run") args.erase(args.begin());

  CLI::App app{"Loop-gas QED estimators and checks"};
  std::string experiment, config_path;
  h::Overrides ov;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  int slices = 0;
  std::string out_dir;
  std::string names;
  for (const auto& n : h::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_path, "INI configuration file");
  auto* o_seed = app.add_option("--seed", seed, "base seed");
  auto* o_samples = app.add_option("--samples", samples, "number of samples N")->check(CLI::PositiveNumber);
  auto* o_slices = app.add_option("--slices", slices, "time slices M");
  auto* o_out = app.add_option("--out", out_dir, "output directory");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  ov.experiment = experiment;
  if (*o_seed) ov.seed = seed;
  if (*o_samples) ov.samples = samples;
  if (*o_slices) ov.slices = slices;
  if (*o_out) ov.out_dir = out_dir;

  h::ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? h::parse_config("", ov) : h::load_config(config_path, ov);
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  loopqed::apply_thread_override();
  try {
    const h::ExperimentResult result = h::run_experiment(cfg);
    h::write_outputs(cfg, result);
    for (const auto& row : result.rows) {
      std::printf("%-40s %-24.10g %s\n", row.rec.quantity.c_str(), row.rec.value,
                  row.pass ? (*row.pass ? "ok" : "OUTSIDE TOLERANCE") : "");
    }
    std::printf("wrote %s/%s.{csv,json} (fingerprint %s)\n", cfg.out_dir.c_str(),
                result.experiment.c_str(), h::hex(cfg.fingerprint).c_str());
    return 0;
  } catch (const loopqed::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << " (achieved error " << e.achieved() << ")\n";
    return 1;
  } catch (const loopqed::DomainError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return 2;
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
