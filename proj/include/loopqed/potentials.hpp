#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "loopqed/paths.hpp"
#include "loopqed/scales.hpp"
#include "loopqed/spectral.hpp"

namespace loopqed {

struct QuadSpec {
  int polar_nodes = 32;     // Gauss-Legendre in cos(theta), axis along r
  int azimuth_nodes = 32;   // trapezoid in phi
  double radial_rel_tol = 1e-7;
  double radial_abs_tol = 1e-13;
  std::size_t radial_max_intervals = 400;
  double k_max_factor = 8.0;  // gaussian cutoff: integrate to k_max_factor * k_cut
  // t-representation of the constant A
  double t_rel_tol = 1e-10;
  double t_abs_tol = 1e-13;

  void validate() const;
  /// FNV-1a over the fields in a fixed order.
  std::uint64_t fingerprint() const;
};

/// Everything needed to evaluate one pair interaction, with lengths in a common unit.
struct PairContext {
  const LoopShape* a = nullptr;
  const LoopShape* b = nullptr;
  Vec3 r{};  // r_a - r_b
  double lambda_a = 0.0;
  double lambda_b = 0.0;
  double lambda_ph = 0.0;
  double coupling = 0.0;  // 1 / (beta sqrt(m_a m_b) c^2) = lambda_a lambda_b / lambda_ph^2
  FormFactor g;
  QuadSpec quad;
};

/// Fills lambdas and coupling for two species of a ScaleSet.
PairContext make_pair_context(const ScaleSet& scales, const Filament& a, const Filament& b,
                              const FormFactor& g, const QuadSpec& quad = {});

inline double magnetic_coupling(double lambda_a, double lambda_b, double lambda_ph) {
  return lambda_a * lambda_b / (lambda_ph * lambda_ph);
}

// ---- Coulomb ----------------------------------------------------------------

struct CoulombValue {
  double value = 0.0;
  bool regularized = false;  // some matched pair came closer than eps * lambda
};

/// Equal-time loop-loop Coulomb sum: sum over winding offsets m, m' of
/// (1/M) sum_j 1 / |r_a + lambda_a X_a(j/M + m) - r_b - lambda_b X_b(j/M + m')|.
/// Distances below eps * max(lambda) are capped there.
CoulombValue coulomb_pair(const LoopShape& a, const Vec3& anchor_a, double lambda_a,
                          const LoopShape& b, const Vec3& anchor_b, double lambda_b,
                          double eps = 1e-3);

/// Self energy (e^2/2) sum_{m != m'} (1/M) sum_j 1 / |lambda (X(j/M + m) - X(j/M + m'))|.
/// Zero for q = 1.
CoulombValue self_energy(const LoopShape& loop, double lambda, double charge, double eps = 1e-3);

// ---- Magnetic ---------------------------------------------------------------

enum class Projector {
  transverse,    // delta - khat khat
  longitudinal,  // khat khat
  identity,      // delta
};

enum class ToeplitzMethod { fast, reference };

/// sum_{m, m'} x_m y_m' Q(u, (m - m') / M) over one period of M slices.
/// fast: O(M) two-sided recursion on Q_d = C (rho^d + rho^{M-d}); reference: O(M^2).
std::complex<double> toeplitz_q_sum(std::span<const std::complex<double>> x,
                                    std::span<const std::complex<double>> y, double u,
                                    ToeplitzMethod method = ToeplitzMethod::fast);

struct MagneticOptions {
  Projector projector = Projector::transverse;
  ToeplitzMethod method = ToeplitzMethod::fast;
  bool throw_on_failure = true;
};

struct MagneticResult {
  double value = 0.0;     // coupling * integral
  double integral = 0.0;  // the k-space integral alone
  double error = 0.0;     // radial + angular estimate, on the integral
  double angular_error = 0.0;
  bool converged = false;
};

/// W_m = coupling * int d^3k/(2pi)^3 e^{ik.r} (4 pi g^2 / k^2) P_{mu nu}(k) J_{mu nu}(k),
/// J = sum_{jl} dX_a,j e^{-i k.lambda_a Xbar_a,j} dX_b,l e^{i k.lambda_b Xbar_b,l}
///     Q(lambda_ph k, tau_j - tau_l).
/// Throws NumericError carrying the achieved error if the radial quadrature fails.
MagneticResult w_magnetic(const PairContext& ctx, const MagneticOptions& opt = {});

/// Independent evaluation of the classical-field limit (Q = 1): the double line integral
/// factorizes into a product of single line integrals.
MagneticResult w_magnetic_classical(const PairContext& ctx);

// ---- Dipolar Coulomb tail ---------------------------------------------------

/// D = int int (delta(s - s') - 1) xi_a xi_b with the delta atom as weight 1/dtau on the
/// diagonal cell and xi at cell midpoints:
/// (1/M) sum_j xbar_a,j xbar_b,j - (1/M sum xbar_a)(1/M sum xbar_b), q = 1.
Mat3 dipole_overlap(const LoopShape& a, const LoopShape& b);

/// lambda_a lambda_b D : (delta - 3 rhat rhat) / r^3.
double w_coulomb_tail(const LoopShape& a, const LoopShape& b, const Vec3& r, double lambda_a,
                      double lambda_b);
double w_coulomb_tail(const PairContext& ctx);

// ---- Gibbs weight -----------------------------------------------------------

struct Loop {
  LoopShape shape;
  Vec3 anchor{};
  double lambda = 0.0;
  double charge = 0.0;
};

using ExternalPotential = std::function<double(const Loop&)>;

struct GibbsResult {
  double weight = 1.0;
  double exponent = 0.0;  // -beta * energy
  bool regularized = false;
};

/// exp[-beta (sum_r U_r + e_r^2/2 W_m(r, r)) - beta (U_pot + sum_{r<s} e_r e_s W_m(r, s))].
/// Throws NumericError naming the offending pair if a component is not finite.
GibbsResult gibbs_weight(std::span<const Loop> loops, double beta, double lambda_ph,
                         const FormFactor& g, const QuadSpec& quad,
                         const ExternalPotential& v_ext = nullptr);

}  // namespace loopqed
