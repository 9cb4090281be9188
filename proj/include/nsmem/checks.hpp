#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsmem/constants.hpp"
#include "nsmem/field.hpp"
#include "nsmem/solver.hpp"

namespace nsmem {

/// Constants measured from the discrete operators of one configuration:
/// the trilinear bound constant, the noise-profile norms and everything
/// derived from them, plus the kernel mass and forcing norm used by the
/// free-term calibration.
struct MeasuredConstants {
  ConstantsLedger lc;
  double kappa = 0.0;
  double f_H = 0.0;
};

MeasuredConstants measure_run_constants(const Simulator& sim);

/// Outcome of one verification item.  `value` is the headline measurement
/// and `tol` the bound it was held against; `detail` is a one-line summary
/// suitable for report files.
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tol = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct CheckSuite {
  std::vector<CheckResult> results;
  bool all_pass() const;
};

/// Reference pseudo-spectral product by direct mode summation: the dealiased
/// P (u . grad) v evaluated in O(N^4) without FFTs.  Small grids only.
Field direct_bilinear_oracle(const Field& u, const Field& v);

/// Zeroes every mode with |k1| or |k2| above kmax.
Field truncate_modes(const Field& u, int kmax);

/// Each check is self-contained and deterministic; the default arguments
/// reproduce the acceptance gate, smaller ones serve the fast suite.
CheckResult check_divergence_projection(int n_steps = 10000);
CheckResult check_trilinear_identities(int trials = 100);
CheckResult check_dealiasing_oracle();
CheckResult check_unforced_decay(double t_end = 5.0);
CheckResult check_linear_split_decay(double t_end = 5.0);
CheckResult check_memory_oracles(int driven_steps = 1000);
CheckResult check_ou_statistics(int64_t n_steps = 100000);
CheckResult check_absorbing_radius(int members = 16);
CheckResult check_far_field(double t_end = 5.0);
CheckResult check_continuous_dependence();
CheckResult check_epsilon_scaling();
CheckResult check_semicontinuity();
CheckResult check_reproducibility();

/// Invariant subset sized for a fresh-checkout smoke run (about half a
/// minute); covers spectral identities, memory and OU oracles, decay,
/// split consistency and reproducibility at reduced spans.
CheckSuite run_fast_suite();

/// Every check at acceptance scale.  Slow; the ensemble items dominate.
CheckSuite run_full_suite();

}  // namespace nsmem
