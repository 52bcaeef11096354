#pragma once

#include "loopqed/potentials.hpp"

namespace loopqed {

/// Single-q transforms L_l(t) = int_0^inf q j_l(q) e^{-t q} dq, l = 0, 2 (closed form).
double single_q_transform0(double t);
double single_q_transform2(double t);

/// Same by direct quadrature (t > 0); used to check the closed forms.
double single_q_transform_numeric(int l, double t);

/// Sum_{mu nu} P1_{mu nu} P2_{mu nu} for transverse projectors P = delta - qhat qhat,
/// built as explicit 3x3 matrices.
double transverse_contraction(const Vec3& q1, const Vec3& q2);

struct RouteValue {
  double value = 0.0;
  double error = 0.0;
};

/// The constant A of the sub-photon regime, <W_m^2> ~ A lambda_a^2 lambda_b^2 / (r^3 lambda_ph^3).
///
/// t-route: 1/(q1+q2) = int dt e^{-t(q1+q2)} factorizes the two k-integrals; each becomes a
/// 3x3 tensor built from L_0(t), L_2(t) and the pair is contracted numerically.
/// b-route: 1/(2(q1+q2)) = (1/pi) int db q1 q2 / ((q1^2+b^2)(q2^2+b^2)); the k-integrals
/// become transverse Yukawa kernels whose radial moments are evaluated by quadrature.
/// Both are reported for the first-principles tensor factor tr(P1 P2) = 1 + (q1.q2)^2 and
/// for the alternative factor (q1.q2)^2 - 3.
struct ConstantA {
  RouteValue t_route;
  RouteValue b_route;
  RouteValue t_route_alt;  // alternative tensor factor
  RouteValue b_route_alt;
  double value = 0.0;      // t_route.value
  double error = 0.0;      // t_route.error
  bool routes_agree = false;
  std::uint64_t fingerprint = 0;
};

/// Cached per QuadSpec fingerprint; thread-safe.
ConstantA constant_A(const QuadSpec& quad = {});

/// Uncached evaluation.
ConstantA compute_constant_A(const QuadSpec& quad);

}  // namespace loopqed
