#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nsmem/field.hpp"
#include "nsmem/kernel.hpp"

namespace nsmem {

/// Quadrature description for the past-history variable eta^t(s).
///
/// The age axis carries kernel-weighted Gauss nodes: geometrically graded
/// cells over (0, s_max] with two nodes per cell placed and weighted so that
/// sum_j w_j F(s_j) integrates mu(s) F(s) exactly for piecewise-cubic F.
/// Weights are positive and sum to kappa up to the analytic tail closure, so
/// the discrete M-norm is a true norm.
struct HistoryGrid {
  std::shared_ptr<const SpectralGrid> grid;
  KernelSpec kernel;
  double s_min = 0.0;   ///< resolution floor, normally the step size
  double s_max = 0.0;   ///< truncation age, default 20/delta
  double gamma = 0.0;   ///< relative age gap kept in the sample ledger
  std::vector<double> s_nodes;       ///< ascending quadrature ages
  std::vector<double> quad_weights;  ///< matching mu-weighted weights
};

/// Builds the quadrature grid.  `nodes` must be even (two per cell);
/// defaults: nodes = 64, s_max = 20/delta, gamma = 0.18.
std::shared_ptr<const HistoryGrid> make_history_grid(
    std::shared_ptr<const SpectralGrid> grid, const KernelSpec& kernel,
    double s_min, int nodes = 64, double s_max = 0.0, double gamma = 0.18);

/// One stored interval of past velocity: `inc` integrates u(t - tau) for tau
/// in (prev_age, age], so eta at a boundary is an exact prefix sum.
struct LedgerEntry {
  double age = 0.0;
  std::shared_ptr<const Field> inc;
};

/// Immutable snapshot of the past-history variable.
///
/// eta^t(s) = integral_0^s u(t - tau) dtau is represented by exact interval
/// increments of the displacement record (youngest first).  Values at sample
/// boundaries carry no transport error; ages between boundaries are read
/// through cubic interpolation of the prefix record, and eta(0) = 0 with
/// eta(s) = s * u on the sub-step range is built in.  advance produces a new
/// state; snapshots share interval storage.
struct HistoryState {
  std::shared_ptr<const HistoryGrid> hgrid;
  std::vector<LedgerEntry> ledger;
};

/// Zero history.
HistoryState empty_history(std::shared_ptr<const HistoryGrid> hgrid);

/// Seeds eta(s) = integral_0^s rho(sigma) dsigma * shape by composite
/// trapezoid on each ledger interval.
HistoryState init_history(std::shared_ptr<const HistoryGrid> hgrid,
                          const std::function<double(double)>& rho,
                          const Field& shape);

/// Shift by dt and deposit the new interval dt * u; prunes the ledger back to
/// the geometric gap profile and drops content beyond s_max.  Retained
/// boundary values are unchanged, so transport is exact there.
HistoryState advance_history(const HistoryState& h, const Field& u, double dt);

/// eta at one age (test and serialization support).
Field history_at(const HistoryState& h, double s);

/// sum_j w_j A eta(s_j), the discrete memory term integral mu(s) A eta(s) ds.
/// Divergence-free when the deposited velocities are.
Field memory_convolution(const HistoryState& h);
/// Hot-path variant writing into `out` (grid must match).
void memory_convolution(const HistoryState& h, Field& out);

/// M-norm: sqrt(sum_j w_j ||eta(s_j)||_V^2); finite and nonnegative.
double norm_M(const HistoryState& h);
/// M1-norm: same weights with the W-norm.
double norm_M1(const HistoryState& h);
/// <a,b>_M = sum_j w_j <A^{1/2} a(s_j), A^{1/2} b(s_j)>_H.
double inner_M(const HistoryState& a, const HistoryState& b);

/// ca * a + cb * b for states advanced in lockstep (identical ledger ages);
/// throws std::invalid_argument otherwise.
HistoryState history_combine(double ca, const HistoryState& a, double cb,
                             const HistoryState& b);

/// Reference past history evaluated directly from a velocity record.
///
/// `u_record` holds the per-step velocities (oldest first) that generated the
/// path, each treated as constant over its step of length dt; the query age s
/// is measured back from the end of the record.  Used as the independent
/// oracle against advance_history.
Field brute_force_history_at(const std::vector<Field>& u_record, double dt,
                             double s);

/// Exact reduction of the memory integral for exponential kernels:
/// m(t) = integral mu(s) eta(t,s) ds obeys m' = -delta m + kappa u, advanced
/// here by integrating factor with u linear over the step.  The memory term
/// equals A m, giving an s-resolution-free oracle for memory_convolution.
struct MemoryOracle {
  double delta = 0.0;
  double kappa = 0.0;
  Field m;

  MemoryOracle(const KernelSpec& kernel,
               std::shared_ptr<const SpectralGrid> grid);
  /// One step with endpoint velocities u_a (old) and u_b (new).
  void advance(const Field& u_a, const Field& u_b, double dt);
  /// A m, the oracle value of the convolution.
  Field convolution() const;
};

}  // namespace nsmem
