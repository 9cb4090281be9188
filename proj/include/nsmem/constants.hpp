#pragma once

#include <cstdint>

namespace nsmem {

/// Named constants threaded through the energy estimates.
///
/// Inputs come from the configuration, c_hat and c_tilde are measured from
/// the discrete operators, and the rest are derived.  The quartic constant
/// c5 appears in two derivations with different prefactors; both are kept and
/// the conservative (larger) one is used for selection rules.
struct ConstantsLedger {
  // inputs
  double nu = 0.0;
  double delta = 0.0;
  double lambda1 = 0.0;
  // measured
  double c_hat = 0.0;    ///< trilinear interpolation-bound constant
  double c_tilde = 0.0;  ///< max of ||h||, ||A^{1/2}h||, ||Ah|| for the noise profile
  // derived
  double delta0 = 0.0;   ///< min(nu lambda1 / 2, delta / 2)
  double delta2 = 0.0;   ///< min(nu lambda1 / 8, delta / 2)
  double c0 = 0.0;       ///< 2 (c_hat c_tilde)^2 / nu
  double c5_a = 0.0;     ///< 3456 (c_hat c_tilde)^4 / nu^3
  double c5_b = 0.0;     ///< 11664 (c_hat c_tilde)^4 / nu^3
  // chosen
  double sigma = 0.0;    ///< noise relaxation rate in use

  double c5() const { return c5_a > c5_b ? c5_a : c5_b; }
};

/// Fills the derived entries from inputs and measurements.
ConstantsLedger derive_constants(double nu, double delta, double lambda1,
                                 double c_hat, double c_tilde);

/// Selection rule sigma = 1.1 max{c0 eps^2/(2 delta0), c5 eps^4/(2 delta0),
/// delta0}; the floor keeps sigma positive at eps = 0.
double choose_sigma(const ConstantsLedger& lc, double epsilon);

/// Stationary mean of beta1 = z^2 + z^4 for the exact scheme:
/// 1/(2 sigma) + 3/(4 sigma^2).
double expected_beta1(double sigma);

}  // namespace nsmem
