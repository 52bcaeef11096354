#include "loopqed/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include "loopqed/error.hpp"

namespace loopqed::quad {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  // legendre_p_zeros returns the non-negative zeros in increasing order.
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  GaussLegendre rule;
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  for (double z : zeros) {
    rule.nodes.push_back(z);
    rule.weights.push_back(weight(z));
  }
  return rule;
}

}  // namespace loopqed::quad
