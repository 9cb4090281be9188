#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsmem/forcing.hpp"

namespace nsmem {

/// Full run description.  JSON layout mirrors the nested structs; every key
/// is optional with the defaults below, unknown keys are errors, and
/// `schema_version` must be 1 when present.
struct SimConfig {
  struct Grid {
    double L = 2.0 * 3.14159265358979323846;
    int N = 32;
  } grid;

  struct Kernel {
    double delta = 1.0;
    double s_max = 0.0;   ///< 0 = auto (20 / delta)
    int nodes = 64;
    double gamma = 0.18;  ///< ledger age-gap fraction
  } kernel;

  struct Physics {
    double nu = 0.05;
    BumpSpec forcing{0.05, -1.0, -1.0, -1.0};
    BumpSpec noise_profile{0.25, -1.0, -1.0, -1.0};
  } physics;

  struct Noise {
    uint64_t seed = 1;
    double sigma = 1.0;
    double epsilon = 0.0;
  } noise;

  struct Integration {
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 100;
    bool per_step_series = false;  ///< record per-step energies for residuals
  } integration;

  struct Experiment {
    int members = 32;
    double pullback_T = 20.0;
    double radius = 1.0;
    std::vector<double> eps_list{1.0, 0.5, 0.2, 0.1};
    std::vector<uint64_t> seeds{1, 2, 3, 4};
    double tol = 1e-3;
    int max_doublings = 3;
  } experiment;

  int schema_version = 1;
};

/// Parses JSON text; throws std::runtime_error naming any unknown key or
/// ill-typed value.
SimConfig parse_config(const std::string& json_text);

/// Round-trips through parse_config; doubles print in shortest form.
std::string dump_config(const SimConfig& cfg);

/// Applies NSMEM_* environment overrides (NSMEM_SEED, NSMEM_EPSILON,
/// NSMEM_THREADS is read by the CLI).  Returns names applied.
std::vector<std::string> apply_env_overrides(SimConfig& cfg);

}  // namespace nsmem
