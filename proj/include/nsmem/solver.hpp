#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nsmem/config.hpp"
#include "nsmem/convection.hpp"
#include "nsmem/field.hpp"
#include "nsmem/history.hpp"
#include "nsmem/noise.hpp"

namespace nsmem {

/// Raised when the energy guard trips (state energy beyond 1e12 times the
/// starting energy or non-finite).
struct BlowUpError : std::runtime_error {
  double t = 0.0;
  explicit BlowUpError(double t_at);
};

/// Instantaneous solver state on the step lattice t = n dt.
///
/// v is the transformed velocity, eta the past history, z the scalar
/// relaxation value multiplying the noise profile.
struct SimState {
  int64_t n = 0;
  double t = 0.0;
  double z = 0.0;
  Field v;
  HistoryState eta;
};

/// Scalar snapshot of one state.
struct TrajectorySample {
  double t = 0.0;
  double z = 0.0;
  double v_H2 = 0.0;     ///< ||v||_H^2
  double v_V2 = 0.0;     ///< ||v||_V^2
  double eta_M2 = 0.0;   ///< ||eta||_M^2
  double div_max = 0.0;  ///< max_k |k . vhat|

  double psi2() const { return v_H2 + eta_M2; }
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  ///< sampled every sample_every steps
  std::vector<TrajectorySample> steps;    ///< one row per lattice point if requested
  SimState last;
};

/// Record of the co-evolved splitting psi = psi_L + psi_N where psi_L is the
/// unforced part advected by the full velocity and psi_N is recovered as the
/// complement (and integrated directly as a cross-check).
struct SplitSample {
  double t = 0.0;
  double full2 = 0.0;        ///< ||psi||^2 in the product space
  double lin2 = 0.0;         ///< ||psi_L||^2
  double nonlin2 = 0.0;      ///< ||psi - psi_L||^2
  double direct_err = 0.0;   ///< ||psi - psi_L - psi_N|| / ||psi||
};

struct SplitTrajectory {
  std::vector<SplitSample> samples;
  SimState last;         ///< full state
  SimState last_lin;     ///< psi_L
  SimState last_nonlin;  ///< directly integrated psi_N
};

/// Number of steps covering [0, t_end]; t_end must sit on the dt lattice.
int64_t step_count(double t_end, double dt);

/// Pathwise integrator for the transformed system
///   v_t + nu A v + integral mu A eta ds + B(v + eps y, v + eps y)
///       = f + eps (sigma y - nu A y),   y = z h,
/// with the Stokes part handled by the exact per-mode factor e^{-nu |k|^2 dt}
/// and everything else by a two-stage Heun correction.  The history advances
/// once per step with the stage-averaged advecting velocity, z by the exact
/// relaxation update on the same increment lattice.  Every emitted state is
/// re-projected, so divergence stays at roundoff.
class Simulator {
 public:
  Simulator(std::shared_ptr<const SpectralGrid> grid,
            std::shared_ptr<const HistoryGrid> hgrid, const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  const std::shared_ptr<const SpectralGrid>& grid() const { return grid_; }
  const std::shared_ptr<const HistoryGrid>& hgrid() const { return hgrid_; }
  const Field& forcing() const { return f_; }
  const Field& profile() const { return h_; }

  /// State at lattice position n (t = n dt).
  SimState make_state(int64_t n, Field v, HistoryState eta, double z) const;

  /// The five right-side terms, individually retrievable.
  struct RhsTerms {
    Field stokes;     ///< -nu A v
    Field memory;     ///< -sum_j w_j A eta(s_j)
    Field transport;  ///< -B(v + eps y, v + eps y)
    Field forcing;    ///< f
    Field noise;      ///< eps z (sigma h - nu A h)
  };
  RhsTerms rhs_terms(const SimState& s);
  /// Sum of the five terms.
  Field rhs_v(const SimState& s);

  /// One in-place step consuming path.increment(s.n).
  void step(SimState& s, const NoisePath& path);

  /// Repeated step over n_steps.  Samples are recorded every
  /// cfg.integration.sample_every steps plus both endpoints; the per-step
  /// series additionally records every lattice point (needed by the energy
  /// audit).  Throws BlowUpError on guard trip.
  Trajectory integrate(SimState s0, const NoisePath& path, int64_t n_steps,
                       bool per_step_series = false);

  /// Co-evolves the full state, psi_L (advected by the full velocity, no
  /// forcing, psi_L(0) = psi(0)) and psi_N (forced complement from zero
  /// data).  The three systems share stage structure, so the sum
  /// psi_L + psi_N tracks psi to roundoff.
  SplitTrajectory integrate_split(SimState s0, const NoisePath& path,
                                  int64_t n_steps);

  /// u = v + eps z h.
  Field recover_u(const SimState& s) const;

  /// Scalar snapshot used by the trajectory records.
  TrajectorySample snapshot(const SimState& s) const;

 private:
  void explicit_rhs(const Field& u_adv, const Field& v_arg, bool forced,
                    double z, const Field& memconv, Field& out);
  void step_impl(SimState& s, const NoisePath& path, Field& memconv,
                 bool& memconv_valid, double guard);
  double guard_for(const SimState& s) const;

  std::shared_ptr<const SpectralGrid> grid_;
  std::shared_ptr<const HistoryGrid> hgrid_;
  SimConfig cfg_;
  Field f_;           ///< forcing profile
  Field h_;           ///< noise profile
  Field noise_term_;  ///< sigma h - nu A h
  std::vector<double> decay_;  ///< e^{-nu |k|^2 dt} per mode
  ConvectionWorkspace conv_;
  Field un_, ustar_, uavg_, g1_, g2_;  // step scratch
};

/// Builds grid, history grid (s_min = dt) and simulator from one config.
Simulator make_simulator(const SimConfig& cfg);

}  // namespace nsmem
