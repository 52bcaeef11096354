#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "loopqed/potentials.hpp"
#include "loopqed/scales.hpp"

namespace loopqed {

// ---- Small-k quantum correction and the screening cancellation ---------------

/// T_{mu nu} = int d^3k/(2pi)^3 e^{ik.r} khat_mu khat_nu, evaluated numerically with a
/// Gaussian regulator of width |r|/8 (analytic value (delta - 3 rhat rhat)/(4 pi r^3)).
struct KTensor {
  Mat3 value{};
  double error = 0.0;
};
KTensor longitudinal_k_tensor(const Vec3& r);

/// S_{mu nu} = sum_{jl} dX_a,j^mu dX_b,l^nu P(tau_j - tau_l), P(s) = s^2 - |s| + 1/6.
Mat3 small_k_double_integral(const LoopShape& a, const LoopShape& b);

struct CorrectionValue {
  double value = 0.0;
  double error = 0.0;  // from the k-tensor quadrature
};

/// -2 pi lambda_a lambda_b T : S, the O(k^2) part of W_m with the path exponentials at k = 0.
CorrectionValue wm_quantum_correction(const PairContext& ctx);
/// Same with a precomputed tensor for ctx.r (reused across samples at one separation).
CorrectionValue wm_quantum_correction(const PairContext& ctx, const KTensor& T);

struct IbpCheck {
  Mat3 lhs{};  // S
  Mat3 rhs{};  // 2 D
  double gap = 0.0;  // Frobenius norm of lhs - rhs
};
IbpCheck ibp_identity_check(const LoopShape& a, const LoopShape& b);

/// |wm_quantum_correction + w_coulomb_tail| budget: k-tensor error plus the cell bound
/// (lambda_a lambda_b / 4M r^3) * 2 * sum_j |dX_a,j| |dX_b,j|.
double cancellation_budget(const PairContext& ctx, double k_tensor_error);

// ---- Closed forms -------------------------------------------------------------

/// (lambda_ph^2 / (beta sqrt(m_a m_b) c^2), lambda_a lambda_b).
std::pair<double, double> lambda_identity(double beta, double m_a, double m_b, double hbar,
                                          double c);

struct DressedSpecies {
  double charge = 1.0;
  double mass = 1.0;
  double integral_a1 = 0.0;  // dressed root-point integral attached to particle a
  double integral_2b = 0.0;  // and to particle b; both user supplied
};

/// (hbar^4 beta^4 / 48) sum_{g1 g2} I_a1(g1) I_2b(g2) e_g1^2 e_g2^2 / ((beta m_g1 c^2)(beta m_g2 c^2)).
double tail_amplitude_8_10(std::span<const DressedSpecies> species, double beta, double hbar,
                           double c);

/// int_0^1 Q(x q1, t) Q(x q2, t) dt - 1 in closed form, x = lambda_ph / r. Exactly symmetric
/// in q1 <-> q2; Taylor branch for |q1 - q2| < 1e-6 (q1 + q2).
double bracket_C4(double x, double q1, double q2);

/// Same quantity by adaptive quadrature over t (independent oracle).
double bracket_C4_quadrature(double x, double q1, double q2, double tol = 1e-13);

/// Same quantity as the Parseval sum over Fourier modes of Q.
double bracket_C4_modes(double x, double q1, double q2);

/// Large-x asymptote x q1 q2 / (2 (q1 + q2)).
double bracket_C4_asymptote(double x, double q1, double q2);

/// A lambda_a^2 lambda_b^2 / (r^3 lambda_ph^3).
double wm_sq_prediction(double r, double lambda_ph, double lambda_a, double lambda_b, double A);

/// lambda_a^2 lambda_b^2 / (120 r^6).
double wc_sq_prediction(double r, double lambda_a, double lambda_b);

struct RegimeMagnitudes {
  double wm_bound = 0.0;    // coupling * lambda_ph / r^2
  double wc_estimate = 0.0; // lambda_a lambda_b / r^3
  double ratio = 0.0;       // wm_bound / wc_estimate = r / lambda_ph
};
RegimeMagnitudes regime_magnitudes(double r, double lambda_a, double lambda_b, double lambda_ph);

// ---- Normal order ---------------------------------------------------------------

struct NormalOrderCheck {
  double d_gamma = 0.0;              // (2 pi hbar e^2 / m c) int d^3k/(2pi)^3 g^2 / k, closed form
  double matched_continuous = 0.0;   // beta q (4 pi hbar e^2 / m c) int d^3k/(2pi)^3 (g^2/k) C_even(k, 0+)
  double matched_discontinuous = 0.0;// same with C_even(k, 0) = n_k
  double jump_term = 0.0;            // continuous - discontinuous
  double expected = 0.0;             // beta q d_gamma
  double gap = 0.0;                  // |jump_term - expected| / expected (0 when expected = 0)
};
NormalOrderCheck normal_order_check(const Species& species, double beta, const UnitSystem& units,
                                    const FormFactor& g, int q = 1, double rel_tol = 1e-12);

// ---- Cancellation scan record ---------------------------------------------------

/// Dipolar (r^-3) coefficients at one separation, in units of lambda_a lambda_b / r^3.
/// *_sum are signed sums over the sample set, so residual_sum = wc_sum + correction_sum
/// holds exactly; *_rms are root-mean-squares over the same samples.
struct TailReport {
  Regime regime = Regime::non_asymptotic;
  double r = 0.0;
  double x = 0.0;  // lambda_ph / r
  std::size_t samples = 0;
  double wc_sum = 0.0;
  double correction_sum = 0.0;
  double residual_sum = 0.0;
  double wc_rms = 0.0;
  double correction_rms = 0.0;
  double residual_rms = 0.0;
  double budget_rms = 0.0;    // rms of the per-sample cancellation budgets
  double wm_rms = 0.0;        // full dipole-limit W_m (spectral loops)
  double wm_over_wc = 0.0;    // wm_rms / wc_rms(spectral)
  double wm_over_wc_se = 0.0;
  double screened_rms = 0.0;  // rms of W_c + W_m (spectral loops): what survives screening
};

}  // namespace loopqed
