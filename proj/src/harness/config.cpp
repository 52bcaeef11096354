#include "loopqed/harness/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "loopqed/error.hpp"

namespace loopqed::harness {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "run.experiment",        "run.seed",
      "run.samples",           "run.slices",
      "run.out",               "scales.lambda_a",
      "scales.lambda_b",       "scales.lambda_ph",
      "scales.lambda_cut",     "scales.form_factor",
      "physical.beta",         "physical.hbar",
      "physical.c",            "physical.k_B",
      "physical.species",      "physical.pair",
      "physical.reference_mass", "quadrature.polar_nodes",
      "quadrature.azimuth_nodes", "quadrature.radial_rel_tol",
      "quadrature.radial_abs_tol", "quadrature.radial_max_intervals",
      "quadrature.k_max_factor", "quadrature.t_rel_tol",
      "quadrature.t_abs_tol",  "scan.r_grid",
      "thresholds.much_less",  "normal_order.winding"};
  return keys;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ConfigError(key + ": not a finite number: '" + v + "'");
  return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0)) throw ConfigError(key + " must be positive");
}

ExperimentConfig build(std::map<std::string, std::string> e, const Overrides& o) {
  if (o.seed) e["run.seed"] = std::to_string(*o.seed);
  if (o.samples) e["run.samples"] = std::to_string(*o.samples);
  if (o.slices) e["run.slices"] = std::to_string(*o.slices);
  if (o.experiment) e["run.experiment"] = *o.experiment;
  // out is where results go, not what they are: kept out of the fingerprint.
  std::string out_dir = o.out_dir ? *o.out_dir : (e.count("run.out") ? e["run.out"] : ".");
  e.erase("run.out");

  for (const auto& [k, v] : e)
    if (!known_keys().count(k)) throw ConfigError("unknown key '" + k + "'");

  ExperimentConfig c;
  c.out_dir = out_dir;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = e.find(k);
    return it == e.end() ? nullptr : &it->second;
  };

  if (auto v = get("run.experiment")) c.experiment = *v;
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  if (auto v = get("run.seed")) c.seed = to_int<std::uint64_t>("run.seed", *v);
  if (auto v = get("run.samples")) {
    const auto n = to_int<long long>("run.samples", *v);
    if (n < 1) throw ConfigError("run.samples must be >= 1");
    c.samples = static_cast<std::size_t>(n);
  }
  if (auto v = get("run.slices")) c.slices = to_int<int>("run.slices", *v);
  if (c.slices < 2) throw ConfigError("run.slices must be >= 2");

  auto num = [&](const std::string& k, double& dst) {
    if (auto v = get(k)) dst = to_double(k, *v);
  };
  num("scales.lambda_a", c.scales.lambda_a);
  num("scales.lambda_b", c.scales.lambda_b);
  num("scales.lambda_ph", c.scales.lambda_ph);
  num("scales.lambda_cut", c.scales.lambda_cut);
  if (auto v = get("scales.form_factor")) {
    if (*v == "gaussian") c.form_factor = FormFactorKind::gaussian;
    else if (*v == "sharp") c.form_factor = FormFactorKind::sharp;
    else throw ConfigError("scales.form_factor must be gaussian or sharp");
  }

  const bool any_physical = std::any_of(e.begin(), e.end(), [](const auto& kv) {
    return kv.first.rfind("physical.", 0) == 0;
  });
  if (any_physical) {
    PhysicalInput p;
    num("physical.beta", p.beta);
    num("physical.hbar", p.units.hbar);
    num("physical.c", p.units.c);
    num("physical.k_B", p.units.k_B);
    num("physical.reference_mass", p.reference_mass);
    const std::string* sp = get("physical.species");
    if (!sp) throw ConfigError("physical.species is required with a [physical] section");
    // label:mass:charge, comma separated
    for (const auto& item : split(*sp, ',')) {
      const auto f = split(item, ':');
      if (f.size() != 3 || f[0].empty()) throw ConfigError("physical.species: expected label:mass:charge");
      p.species.push_back({f[0], to_double("physical.species", f[1]), to_double("physical.species", f[2])});
    }
    const std::string* pair = get("physical.pair");
    const auto labels = pair ? split(*pair, ',') : std::vector<std::string>{p.species.front().label,
                                                                          p.species.back().label};
    if (labels.size() != 2) throw ConfigError("physical.pair: expected two labels");
    p.species_a = labels[0];
    p.species_b = labels[1];
    try {
      const ScaleSet s = derive_scales(p.species, p.beta, p.reference_mass, p.units);
      c.scales = {s.lambda_of(p.species_a), s.lambda_of(p.species_b), s.lambda_ph, s.lambda_cut};
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("physical: ") + ex.what());
    }
    c.physical = p;
  }
  if (!(c.scales.lambda_a >= 0) || !(c.scales.lambda_b >= 0))
    throw ConfigError("scales.lambda_a/lambda_b must be non-negative");
  require_positive("scales.lambda_ph", c.scales.lambda_ph);
  require_positive("scales.lambda_cut", c.scales.lambda_cut);

  auto inum = [&](const std::string& k, int& dst) {
    if (auto v = get(k)) dst = to_int<int>(k, *v);
  };
  inum("quadrature.polar_nodes", c.quad.polar_nodes);
  inum("quadrature.azimuth_nodes", c.quad.azimuth_nodes);
  num("quadrature.radial_rel_tol", c.quad.radial_rel_tol);
  num("quadrature.radial_abs_tol", c.quad.radial_abs_tol);
  if (auto v = get("quadrature.radial_max_intervals"))
    c.quad.radial_max_intervals = to_int<std::size_t>("quadrature.radial_max_intervals", *v);
  num("quadrature.k_max_factor", c.quad.k_max_factor);
  num("quadrature.t_rel_tol", c.quad.t_rel_tol);
  num("quadrature.t_abs_tol", c.quad.t_abs_tol);
  try {
    c.quad.validate();
  } catch (const DomainError& ex) {
    throw ConfigError(ex.what());
  }

  if (auto v = get("scan.r_grid")) {
    c.r_grid.clear();
    for (const auto& item : split(*v, ',')) c.r_grid.push_back(to_double("scan.r_grid", item));
  }
  if (c.r_grid.empty()) throw ConfigError("scan.r_grid must not be empty");
  for (std::size_t i = 0; i < c.r_grid.size(); ++i) {
    require_positive("scan.r_grid", c.r_grid[i]);
    if (i > 0 && !(c.r_grid[i] > c.r_grid[i - 1]))
      throw ConfigError("scan.r_grid must be strictly increasing");
  }
  num("thresholds.much_less", c.thresholds.much_less);
  require_positive("thresholds.much_less", c.thresholds.much_less);
  inum("normal_order.winding", c.winding);
  if (c.winding < 1) throw ConfigError("normal_order.winding must be >= 1");

  c.entries = std::move(e);
  c.fingerprint = fingerprint_entries(c.entries);
  return c;
}

std::map<std::string, std::string> flatten(const pt::ptree& tree) {
  std::map<std::string, std::string> out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside of a section");
    for (const auto& [key, value] : body) out[section + "." + key] = trim(value.data());
  }
  return out;
}

}  // namespace

std::uint64_t fingerprint_entries(const std::map<std::string, std::string>& entries) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : entries) {
    for (const char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ExperimentConfig parse_config(const std::string& ini_text, const Overrides& overrides) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& ex) {
    throw ConfigError(std::string("malformed config: ") + ex.message() + " (line " +
                      std::to_string(ex.line()) + ")");
  }
  return build(flatten(tree), overrides);
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace loopqed::harness
