#include "loopqed/scales.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "loopqed/error.hpp"

namespace loopqed {

ScaleSet derive_scales(std::span<const Species> species, double beta, double reference_mass,
                       UnitSystem units) {
  if (!(beta > 0.0)) throw DomainError("derive_scales: beta must be positive");
  if (species.empty()) throw DomainError("derive_scales: no species given");
  std::set<std::string> labels;
  for (const auto& s : species) {
    if (!(s.mass > 0.0)) throw DomainError("derive_scales: mass of '" + s.label + "' must be positive");
    if (!labels.insert(s.label).second)
      throw DomainError("derive_scales: duplicate species label '" + s.label + "'");
  }
  if (reference_mass <= 0.0) {
    reference_mass = std::min_element(species.begin(), species.end(), [](const auto& a, const auto& b) {
                       return a.mass < b.mass;
                     })->mass;
  }

  ScaleSet out;
  out.beta = beta;
  out.units = units;
  out.species.assign(species.begin(), species.end());
  out.reference_mass = reference_mass;
  for (const auto& s : species) out.lambda_mat.push_back(units.hbar * std::sqrt(beta / s.mass));
  out.lambda_ph = beta * units.hbar * units.c;
  out.lambda_cut = units.hbar / (reference_mass * units.c);
  out.rel = beta * reference_mass * units.c * units.c;
  return out;
}

double ScaleSet::lambda_of(const std::string& label) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i].label == label) return lambda_mat[i];
  throw DomainError("unknown species '" + label + "'");
}

const Species& ScaleSet::species_of(const std::string& label) const {
  for (const auto& s : species)
    if (s.label == label) return s;
  throw DomainError("unknown species '" + label + "'");
}

double form_factor(const FormFactor& g, double k) {
  if (k < 0.0 || std::isnan(k)) throw DomainError("form_factor: k must be non-negative");
  switch (g.kind) {
    case FormFactorKind::gaussian: {
      const double s = k / g.k_cut;
      return std::exp(-0.5 * s * s);
    }
    case FormFactorKind::sharp:
      return k <= g.k_cut ? 1.0 : 0.0;
  }
  return 0.0;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::beyond_photon: return "beyond_photon";
    case Regime::sub_photon: return "sub_photon";
    case Regime::non_asymptotic: return "non_asymptotic";
  }
  return "?";
}

Regime regime_classify(double r, double lambda_mat, double lambda_ph, RegimeThresholds t) {
  if (!(r > 0.0)) throw DomainError("regime_classify: r must be positive");
  const double m = t.much_less;
  if (lambda_ph >= m * lambda_mat && r >= m * lambda_ph) return Regime::beyond_photon;
  if (r >= m * lambda_mat && lambda_ph >= m * r) return Regime::sub_photon;
  return Regime::non_asymptotic;
}

Regime regime_classify(double r, const ScaleSet& scales, RegimeThresholds t) {
  const double lambda = *std::max_element(scales.lambda_mat.begin(), scales.lambda_mat.end());
  return regime_classify(r, lambda, scales.lambda_ph, t);
}

}  // namespace loopqed
