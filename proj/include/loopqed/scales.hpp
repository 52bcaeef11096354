#pragma once

#include <span>
#include <string>
#include <vector>

namespace loopqed {

struct Species {
  std::string label;
  double mass = 1.0;
  double charge = 1.0;
};

/// Fundamental constants of the unit system in use. Defaults are natural units.
struct UnitSystem {
  double hbar = 1.0;
  double c = 1.0;
  double k_B = 1.0;

  static UnitSystem natural() { return {}; }
  static UnitSystem si() { return {1.054571817e-34, 2.99792458e8, 1.380649e-23}; }
};

/// Length scales of a set of species at inverse temperature beta.
///
/// lambda_ph = beta hbar c, lambda_mat = hbar sqrt(beta / m) per species,
/// lambda_cut = hbar / (m_ref c), rel = beta m_ref c^2. With m = m_ref the
/// chain lambda_cut = lambda_mat / sqrt(rel), lambda_ph = sqrt(rel) lambda_mat holds.
struct ScaleSet {
  double beta = 1.0;
  UnitSystem units;
  std::vector<Species> species;
  std::vector<double> lambda_mat;
  double reference_mass = 1.0;
  double lambda_ph = 1.0;
  double lambda_cut = 1.0;
  double rel = 1.0;

  double lambda_of(const std::string& label) const;
  const Species& species_of(const std::string& label) const;
};

/// Derives all scales. A non-positive reference_mass selects the lightest species.
ScaleSet derive_scales(std::span<const Species> species, double beta,
                       double reference_mass = 0.0,
                       UnitSystem units = UnitSystem::natural());

enum class FormFactorKind { gaussian, sharp };

/// Ultraviolet form factor g(k). Gaussian: exp(-k^2 / (2 k_cut^2)); sharp: 1 on [0, k_cut].
struct FormFactor {
  FormFactorKind kind = FormFactorKind::gaussian;
  double k_cut = 1.0;

  /// Upper end of the k-domain where g^2 is not negligible.
  double support_end(double gaussian_factor = 8.0) const {
    return kind == FormFactorKind::sharp ? k_cut : gaussian_factor * k_cut;
  }
};

double form_factor(const FormFactor& g, double k);

enum class Regime { beyond_photon, sub_photon, non_asymptotic };

const char* to_string(Regime regime);

/// "a << b" is read as b / a >= threshold.
struct RegimeThresholds {
  double much_less = 10.0;
};

Regime regime_classify(double r, double lambda_mat, double lambda_ph,
                       RegimeThresholds thresholds = {});
Regime regime_classify(double r, const ScaleSet& scales, RegimeThresholds thresholds = {});

}  // namespace loopqed
