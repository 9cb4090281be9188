/// Python face of the laboratory: configuration handling, trajectory and
/// split runs, measured constants and the fast verification suite.  Heavy
/// experiment orchestration stays in the command-line tool; these bindings
/// cover the operations notebooks actually poke at.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "nsmem/checks.hpp"
#include "nsmem/config.hpp"
#include "nsmem/diagnostics.hpp"
#include "nsmem/ou.hpp"
#include "nsmem/serialize.hpp"
#include "nsmem/solver.hpp"

namespace py = pybind11;
using namespace nsmem;

namespace {

SimConfig config_from(const std::string& text) {
  return text.empty() ? SimConfig{} : parse_config(text);
}

double stationary_start(const SimConfig& cfg, const NoisePath& path) {
  const auto nz =
      static_cast<int64_t>(std::ceil(24.0 / (cfg.noise.sigma * path.dt)));
  return ou_pullback(path, cfg.noise.sigma, 0.0,
                     static_cast<double>(nz) * path.dt)
      .z;
}

py::dict sample_dict(const std::vector<TrajectorySample>& rows) {
  std::vector<double> t, v_H, eta_M, psi_H, z;
  for (const auto& s : rows) {
    t.push_back(s.t);
    v_H.push_back(std::sqrt(s.v_H2));
    eta_M.push_back(std::sqrt(s.eta_M2));
    psi_H.push_back(std::sqrt(s.psi2()));
    z.push_back(s.z);
  }
  py::dict d;
  d["t"] = t;
  d["v_H"] = v_H;
  d["eta_M"] = eta_M;
  d["psi_H"] = psi_H;
  d["z"] = z;
  return d;
}

}  // namespace

PYBIND11_MODULE(_nsmem, m) {
  m.doc() =
      "pseudo-spectral lab for 2D incompressible flow with fading "
      "viscoelastic memory and relaxation-type noise";

  m.def("version", [] { return std::string(kVersionTag); });

  m.def(
      "default_config", [] { return dump_config(SimConfig{}); },
      "Canonical JSON with every default filled in.");

  m.def(
      "normalize_config",
      [](const std::string& text) { return dump_config(parse_config(text)); },
      py::arg("text"),
      "Parses, validates (unknown keys are errors) and re-serializes.");

  m.def(
      "simulate",
      [](const std::string& config_text) {
        const SimConfig cfg = config_from(config_text);
        Simulator sim = make_simulator(cfg);
        const NoisePath path{cfg.noise.seed, cfg.integration.dt};
        SimState s0 = sim.make_state(0, Field(sim.grid()),
                                     empty_history(sim.hgrid()),
                                     stationary_start(cfg, path));
        const Trajectory tr = sim.integrate(
            std::move(s0), path,
            step_count(cfg.integration.t_end, cfg.integration.dt),
            cfg.integration.per_step_series);
        return sample_dict(cfg.integration.per_step_series ? tr.steps
                                                           : tr.samples);
      },
      py::arg("config_text") = std::string(),
      "Zero-data run; returns sampled norm series as lists.");

  m.def(
      "simulate_csv",
      [](const std::string& config_text) {
        const SimConfig cfg = config_from(config_text);
        Simulator sim = make_simulator(cfg);
        const MeasuredConstants mc = measure_run_constants(sim);
        const NoisePath path{cfg.noise.seed, cfg.integration.dt};
        SimState s0 = sim.make_state(0, Field(sim.grid()),
                                     empty_history(sim.hgrid()),
                                     stationary_start(cfg, path));
        const Trajectory tr = sim.integrate(
            std::move(s0), path,
            step_count(cfg.integration.t_end, cfg.integration.dt),
            cfg.integration.per_step_series);
        const double c_free =
            free_constant(mc.lc, mc.kappa, mc.f_H, cfg.noise.epsilon);
        return trajectory_csv(
            cfg.integration.per_step_series ? tr.steps : tr.samples, mc.lc,
            cfg.noise.epsilon, c_free);
      },
      py::arg("config_text") = std::string(),
      "Zero-data run; returns the frozen trajectory CSV (byte-stable).");

  m.def(
      "split_csv",
      [](const std::string& config_text) {
        const SimConfig cfg = config_from(config_text);
        Simulator sim = make_simulator(cfg);
        const NoisePath path{cfg.noise.seed, cfg.integration.dt};
        Field v0 = random_field(sim.grid(), cfg.noise.seed ^ 0x5eedf1e1dULL,
                                3.0);
        v0.scale(0.5);
        SimState s0 = sim.make_state(0, std::move(v0),
                                     empty_history(sim.hgrid()),
                                     stationary_start(cfg, path));
        const SplitTrajectory st = sim.integrate_split(
            std::move(s0), path,
            step_count(cfg.integration.t_end, cfg.integration.dt));
        return nsmem::split_csv(st.samples);
      },
      py::arg("config_text") = std::string(),
      "Seeded-data split run; returns the frozen split CSV.");

  m.def(
      "measured_constants",
      [](const std::string& config_text) {
        const SimConfig cfg = config_from(config_text);
        Simulator sim = make_simulator(cfg);
        const MeasuredConstants mc = measure_run_constants(sim);
        py::dict d;
        d["lambda1"] = mc.lc.lambda1;
        d["c_hat"] = mc.lc.c_hat;
        d["c_tilde"] = mc.lc.c_tilde;
        d["delta0"] = mc.lc.delta0;
        d["delta2"] = mc.lc.delta2;
        d["c0"] = mc.lc.c0;
        d["c5"] = mc.lc.c5();
        d["sigma"] = mc.lc.sigma;
        d["kappa"] = mc.kappa;
        d["f_norm_H"] = mc.f_H;
        return d;
      },
      py::arg("config_text") = std::string(),
      "Measured and derived estimate constants for one configuration.");

  m.def(
      "fast_suite",
      [] {
        const CheckSuite suite = run_fast_suite();
        py::list out;
        for (const auto& c : suite.results) {
          py::dict d;
          d["name"] = c.name;
          d["pass"] = c.pass;
          d["value"] = c.value;
          d["tol"] = c.tol;
          d["detail"] = c.detail;
          out.append(d);
        }
        return out;
      },
      "Runs the fast verification suite; returns one dict per check.");
}
