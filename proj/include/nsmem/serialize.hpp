#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nsmem/config.hpp"
#include "nsmem/constants.hpp"
#include "nsmem/solver.hpp"

namespace nsmem {

/// Version tag stamped into manifests and checkpoints.
inline constexpr const char* kVersionTag = "nsmem 0.1.0";

/// Shortest decimal string that parses back to exactly `x`.  All text
/// artifacts use this formatter so reruns are byte-identical.
std::string format_double(double x);

/// One CSV line; values through format_double, comma separated, '\n' ended.
void write_csv_header(std::ostream& os, const std::vector<std::string>& names);
void write_csv_row(std::ostream& os, const std::vector<double>& values);

/// Frozen trajectory table: t, v_H, v_V, eta_M, psi_H, z, beta1,
/// diss_residual, res_scale.  The residual columns come from the one-sided
/// dissipation estimate applied to consecutive rows (last row carries 0).
std::string trajectory_csv(const std::vector<TrajectorySample>& rows,
                           const ConstantsLedger& lc, double epsilon,
                           double c_free);

/// Frozen split table: t, psi2_full, psi2_lin, psi2_nonlin, direct_err.
std::string split_csv(const std::vector<SplitSample>& rows);

/// Binary checkpoint of a full simulation state (exact bit round-trip on the
/// writing platform; little-endian doubles).  The config snapshot rides along
/// so a run can be reconstructed from the file alone.
void save_checkpoint(const std::string& path, const SimConfig& cfg,
                     const SimState& s);
void save_checkpoint(std::ostream& os, const SimConfig& cfg, const SimState& s);

/// Config snapshot stored in a checkpoint (read to build the Simulator).
SimConfig checkpoint_config(const std::string& path);

/// State payload; the stream position must be at the start of the file.
/// Throws std::runtime_error when the stored grid or quadrature shape does
/// not match `sim`.
SimState load_checkpoint(const std::string& path, const Simulator& sim);
SimState load_checkpoint(std::istream& is, const Simulator& sim);

/// Exact equality of two states (same step index, time, z, spectral
/// coefficients and ledger bits).  Serialization round-trip gate.
bool states_identical(const SimState& a, const SimState& b);

}  // namespace nsmem
