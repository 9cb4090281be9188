#pragma once

#include <cstdint>
#include <vector>

#include "nsmem/solver.hpp"

namespace nsmem {

/// Ensemble of states sharing one grid and history quadrature.
struct PointCloud {
  double epsilon = 0.0;
  uint64_t omega_seed = 0;
  double t_pullback = 0.0;
  std::vector<SimState> members;
  std::vector<int> dropped;  ///< member indices removed by blow-up
};

/// Node-wise memory distance sqrt(sum_j w_j ||eta_a(s_j) - eta_b(s_j)||_V^2);
/// works for any two states on the same history quadrature, regardless of
/// how their sample ledgers are laid out.
double dist_M(const HistoryState& a, const HistoryState& b);

/// Product-space distance sqrt(||v_a - v_b||^2 + dist_M^2).
double state_distance(const SimState& a, const SimState& b);

/// Ball of `members` random states with product-space norm <= radius,
/// deterministic in `seed`.  Energy is split randomly between the velocity
/// and the history component (seeded smooth profiles).
PointCloud make_ball_cloud(const Simulator& sim, int members, double radius,
                           uint64_t seed);

/// Evolves every member from time -T to 0 along the path drawn from
/// omega_seed (the pullback convention).  Members that trip the blow-up
/// guard are dropped and recorded.  The relaxation value starts from its
/// stationary pullback limit at -T, so the z trajectory is the same for
/// every horizon.
PointCloud pullback_ensemble(Simulator& sim, const PointCloud& initial,
                             uint64_t omega_seed, double T);

/// Convergence record of the increasing-horizon estimate.
struct EstimateCurve {
  std::vector<double> horizons;
  std::vector<double> dist;  ///< full Hausdorff distance between consecutive clouds
  bool converged = false;
};

/// Pullback clouds at increasing horizons until consecutive clouds are
/// within tol (relative to the cloud scale); returns the last cloud as the
/// attractor proxy.  A single-entry horizon list skips the convergence
/// check and flags the curve as unconverged.
PointCloud attractor_estimate(Simulator& sim, uint64_t omega_seed,
                              const std::vector<double>& horizons,
                              double radius, uint64_t cloud_seed, double tol,
                              EstimateCurve* curve = nullptr);

/// max over A of min over B of the product-space distance (asymmetric).
double hausdorff_semidist(const PointCloud& A, const PointCloud& B);

/// Noise-sweep upper-semicontinuity report: per epsilon and seed, the
/// semi-distance from the estimated random attractor to the deterministic
/// baseline.
struct SweepReport {
  std::vector<double> eps_list;
  std::vector<uint64_t> seeds;
  int members = 0;
  double pullback_T = 0.0;
  std::vector<std::vector<double>> dist;  ///< [eps index][seed index]
  std::vector<double> mean_dist;
  std::vector<double> max_dist;
  bool base_converged = false;
  bool nonincreasing_within_noise = false;  ///< 10% slack along descending eps
  bool smallest_below_largest = false;
  int dropped_total = 0;
};

/// Runs the sweep described by cfg.experiment: estimates the deterministic
/// attractor once, then per (epsilon, seed) estimates the random attractor
/// with the SAME Wiener path across epsilon values and measures the
/// semi-distance.  Convergence ladders run on the first seed only; later
/// seeds reuse the final horizon.
SweepReport semicontinuity_sweep(const SimConfig& cfg);

/// Trajectory-level noise-response scaling and separation growth.
struct ConvergenceReport {
  std::vector<double> eps_list;
  std::vector<double> diff2;       ///< squared distance to the eps=0 run at T
  double slope = 0.0;              ///< d log diff2 / d log eps (expect 2)
  bool slope_ok = false;           ///< within 2 +- 0.3
  std::vector<double> gronwall_c;  ///< fitted growth exponent per eps
  double gronwall_spread = 0.0;    ///< relative spread of the fits
};

/// Matched-path runs over eps_list from identical data (isolating the
/// eps^2 term of the difference bound) plus perturbed-data runs at each eps
/// (isolating the Gronwall factor); T is the comparison horizon and
/// separation0 the initial perturbation size.
ConvergenceReport convergence_bound_check(const SimConfig& cfg,
                                          uint64_t omega_seed,
                                          const std::vector<double>& eps_list,
                                          double T, double separation0);

}  // namespace nsmem
