#include "nsmem/constants.hpp"

#include <algorithm>
#include <cmath>

namespace nsmem {

ConstantsLedger derive_constants(double nu, double delta, double lambda1,
                                 double c_hat, double c_tilde) {
  ConstantsLedger lc;
  lc.nu = nu;
  lc.delta = delta;
  lc.lambda1 = lambda1;
  lc.c_hat = c_hat;
  lc.c_tilde = c_tilde;
  lc.delta0 = std::min(nu * lambda1 / 2.0, delta / 2.0);
  lc.delta2 = std::min(nu * lambda1 / 8.0, delta / 2.0);
  const double cc = c_hat * c_tilde;
  lc.c0 = 2.0 * cc * cc / nu;
  const double cc4 = cc * cc * cc * cc;
  lc.c5_a = 3456.0 * cc4 / (nu * nu * nu);
  lc.c5_b = 11664.0 * cc4 / (nu * nu * nu);
  return lc;
}

double choose_sigma(const ConstantsLedger& lc, double epsilon) {
  const double e2 = epsilon * epsilon;
  const double a = lc.c0 * e2 / (2.0 * lc.delta0);
  const double b = lc.c5() * e2 * e2 / (2.0 * lc.delta0);
  return 1.1 * std::max({a, b, lc.delta0});
}

double expected_beta1(double sigma) {
  return 1.0 / (2.0 * sigma) + 3.0 / (4.0 * sigma * sigma);
}

}  // namespace nsmem
