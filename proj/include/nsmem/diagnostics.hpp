#pragma once

#include <cstdint>
#include <vector>

#include "nsmem/constants.hpp"
#include "nsmem/field.hpp"
#include "nsmem/history.hpp"
#include "nsmem/noise.hpp"
#include "nsmem/solver.hpp"

namespace nsmem {

/// ||v||_H^2 + ||eta||_M^2, the squared product-space energy.
double energy_H(const SimState& s);
/// ||v||_V^2 + ||eta||_M1^2, the higher-order analog.
double energy_H1(const SimState& s);

/// Per-step audit of the dissipation inequality
///   d/dt ||psi||^2 + (nu/2) ||v||_V^2
///     <= (-delta0 + c0 eps^2 beta1) ||psi||^2 + C_free (1 + eps^2 beta1)
/// along a recorded per-step series.  residual[n] is the left side minus the
/// right side over [t_n, t_{n+1}] (forward difference, coefficients at t_n),
/// so nonpositive values certify the estimate.  scale is the largest
/// magnitude among the balance terms, giving the roundoff-relative yardstick.
struct ResidualReport {
  std::vector<double> t;
  std::vector<double> residual;
  double scale = 0.0;
  double worst = 0.0;               ///< max residual
  double violating_fraction = 0.0;  ///< share of steps with residual > tol*scale
  double c_free = 0.0;
  double tol = 0.0;
};

/// Free-term constant for the audit: twice the larger of the forcing block
/// 8 ||f||^2 / (nu lambda1) and the noise block
/// 2 kappa c~^2 / delta + 2 (c^ c~^2)^2 / (nu lambda1)
///   + 16 (sigma^2 + nu^2) c~^2 / (nu lambda1),
/// the latter only when eps > 0.  Vanishes for unforced deterministic runs.
double free_constant(const ConstantsLedger& lc, double kappa, double f_norm_H,
                     double epsilon);

ResidualReport dissipation_residual(const std::vector<TrajectorySample>& steps,
                                    const ConstantsLedger& lc, double epsilon,
                                    double c_free, double tol = 1e-8);

/// Worst ratio ||psi_L(t)||^2 / (e^{-2 delta0 (t - t0)} ||psi_L(t0)||^2)
/// over the recorded samples; 0 when the split starts from zero.
double linear_decay_check(const std::vector<SplitSample>& samples,
                          double delta0);

/// Radial weight rho(|x - x_c|^2 / radius^2) vanishing inside the ball of
/// radius `radius` and saturating at 1 beyond sqrt(2) radius; the bridge is
/// the quintic smoothstep, so sup |rho'| = 1.875.
struct CutoffSpec {
  double radius = 0.0;
  double x_c = 0.0;
  double y_c = 0.0;
  double sup_rho_prime = 1.875;
};

CutoffSpec make_cutoff(double radius, double x_c, double y_c);
/// The profile itself: 0 on [0,1], quintic bridge on [1,2], 1 beyond.
double cutoff_value(double s);
double cutoff_derivative(double s);

/// integral rho |v|^2 dx + sum_j w_j integral rho |grad eta(s_j)|^2 dx with
/// the minimal-image torus distance in the weight.
double cutoff_energy_H(const Field& v, const HistoryState& eta,
                       const CutoffSpec& cut);

/// Sharp-indicator far-field energy: same integrals over |x - x_c| >= R.
/// Nonincreasing in R; R = 0 recovers the full energy.
double tail_energy(const Field& v, const HistoryState& eta, double R,
                   double x_c, double y_c);

/// Both sides of the weighted Poincare comparison
/// (lambda1/4) \int rho |u|^2 <= \int rho |grad u|^2.  The margin
/// rhs - lhs is reported; it is guaranteed nonnegative only for fields
/// supported where rho = 1 (where the plain spectral Poincare inequality
/// applies with factor-4 slack).
struct PoincareResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};
PoincareResult generalized_poincare_check(const Field& u,
                                          const CutoffSpec& cut);

/// Pullback absorbing radii on one noise path.
///
/// r1 = int_{-T}^0 e^{delta0 s + c0 eps^2 int_s^0 beta1} (1 + eps^2 beta1) ds
/// and r3 likewise with exponent weight c5 eps^4 and integrand factor
/// (1 + eps^2 beta1 + c1 eps^2 beta1 (r1 + 1)), c1 = 1; r_hat is the
/// empirical tempered envelope max_s beta1(s) e^{delta2 s}; r2 = r1 + eps^2
/// r_hat and r4 = r3 + eps^2 r_hat.  Quadrature: per-segment products of the
/// exact exponential against a linear interpolant of the slow factor, so the
/// eps = 0 value is (1 - e^{-delta0 T}) / delta0 to machine precision.
struct AbsorbingRadii {
  double epsilon = 0.0;
  double sigma = 0.0;
  double T_trunc = 0.0;
  double dt_quad = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double r4 = 0.0;
  double r_hat = 0.0;
  double truncation_error = 0.0;  ///< estimated discarded tail of r1
};

AbsorbingRadii absorbing_radius(const NoisePath& path,
                                const ConstantsLedger& lc, double epsilon,
                                double T_trunc);

/// Checks that every ensemble member's pullback energy at time 0 eventually
/// stays below C (r2 + 1).  member_energy[m][j] is ||psi(0)||^2 for member m
/// pulled back from horizon horizons[j] (ascending).  The working threshold
/// is twice the worst final energy; T_absorb is the first horizon after
/// which no member exceeds it.
struct AbsorbingReport {
  bool absorbed = false;
  double C = 0.0;
  double T_absorb = -1.0;
  double threshold = 0.0;  ///< C (r2 + 1)
  std::vector<double> horizons;
  std::vector<double> max_energy;  ///< per horizon, max over members
};

AbsorbingReport absorbing_set_check(
    const std::vector<double>& horizons,
    const std::vector<std::vector<double>>& member_energy,
    const AbsorbingRadii& radii);

}  // namespace nsmem
