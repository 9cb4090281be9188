/// @file test_serialize.cpp
/// @brief Text formatting, frozen tables and binary checkpoint round-trips.
///
/// Every artifact the tools emit must be reproducible byte for byte, so the
/// formatter is pinned to shortest-round-trip decimals, the CSV layouts are
/// frozen, and checkpoints must restore a state bit-exactly (including the
/// interval ledger) while rejecting truncated or mismatched files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "nsmem/checks.hpp"
#include "nsmem/diagnostics.hpp"
#include "nsmem/serialize.hpp"
#include "nsmem/solver.hpp"

using namespace nsmem;

namespace {

SimState driven_state(Simulator& sim, uint64_t path_seed, int nsteps) {
  Field v0 = random_field(sim.grid(), 8, 3.0);
  v0.scale(0.5);
  HistoryState eta0 = init_history(
      sim.hgrid(), [](double s) { return 0.3 * std::exp(-s); },
      random_field(sim.grid(), 9, 3.0));
  NoisePath path{path_seed, sim.config().integration.dt};
  Trajectory tr =
      sim.integrate(sim.make_state(0, v0, eta0, 0.2), path, nsteps);
  return tr.last;
}

std::string temp_path(const char* stem) {
  std::string dir = "/tmp";
  if (const char* t = std::getenv("TMPDIR")) dir = t;
  return dir + "/" + stem + "_" + std::to_string(::getpid());
}

}  // namespace

// ============================================================================
// Shortest round-trip formatting
// ============================================================================

TEST_CASE("format_double: parses back to the identical bits") {
  const double values[] = {0.0,       1.0,     -1.0,        0.1,
                           1.0 / 3.0, 1e-300,  -2.5e300,    3.1415926535897932,
                           1e16,      1.25e-7, 123456789.0, 5e-324};
  for (double x : values) {
    const std::string s = format_double(x);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == x);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("csv helpers: comma layout with newline termination") {
  std::ostringstream os;
  write_csv_header(os, {"a", "bb", "c"});
  write_csv_row(os, {1.0, 0.25, -3.0});
  CHECK(os.str() == "a,bb,c\n1,0.25,-3\n");
}

// ============================================================================
// Frozen tables
// ============================================================================

TEST_CASE("trajectory_csv: frozen header, residual layout and determinism") {
  SimConfig cfg;
  cfg.noise.epsilon = 0.4;
  cfg.integration.sample_every = 50;
  Simulator sim = make_simulator(cfg);
  MeasuredConstants mc = measure_run_constants(sim);
  const double c_free = free_constant(mc.lc, mc.kappa, mc.f_H, 0.4);

  Field v0 = random_field(sim.grid(), 3, 3.0);
  NoisePath path{5, cfg.integration.dt};
  Trajectory tr = sim.integrate(
      sim.make_state(0, v0, empty_history(sim.hgrid()), 0.1), path, 200);

  const std::string a = trajectory_csv(tr.samples, mc.lc, 0.4, c_free);
  const std::string b = trajectory_csv(tr.samples, mc.lc, 0.4, c_free);
  CHECK(a == b);

  std::istringstream is(a);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "t,v_H,v_V,eta_M,psi_H,z,beta1,diss_residual,res_scale");
  size_t rows = 0;
  std::string last;
  while (std::getline(is, line)) {
    last = line;
    ++rows;
  }
  CHECK(rows == tr.samples.size());
  // the final row carries a zero residual placeholder
  const size_t tail = last.rfind(',');
  const size_t prev = last.rfind(',', tail - 1);
  CHECK(last.substr(prev + 1, tail - prev - 1) == "0");
}

TEST_CASE("split_csv: frozen header and row count") {
  SimConfig cfg;
  cfg.noise.epsilon = 0.5;
  cfg.integration.sample_every = 100;
  Simulator sim = make_simulator(cfg);
  Field v0 = random_field(sim.grid(), 4, 3.0);
  v0.scale(0.5);
  NoisePath path{6, cfg.integration.dt};
  SplitTrajectory st = sim.integrate_split(
      sim.make_state(0, v0, empty_history(sim.hgrid()), 0.0), path, 300);
  const std::string text = split_csv(st.samples);
  std::istringstream is(text);
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "t,psi2_full,psi2_lin,psi2_nonlin,direct_err");
  size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == st.samples.size());
}

// ============================================================================
// Binary checkpoints
// ============================================================================

TEST_CASE("checkpoint: stream round-trip restores the state bit-exactly") {
  SimConfig cfg;
  cfg.noise.epsilon = 0.6;
  Simulator sim = make_simulator(cfg);
  SimState s = driven_state(sim, 11, 400);

  std::stringstream buf;
  save_checkpoint(buf, cfg, s);
  SimState r = load_checkpoint(buf, sim);
  CHECK(states_identical(s, r));
  CHECK(r.t == s.t);
  CHECK(r.n == s.n);
}

TEST_CASE("checkpoint: file round-trip with config recovery") {
  SimConfig cfg;
  cfg.noise.epsilon = 0.25;
  cfg.noise.seed = 77;
  cfg.integration.dt = 2e-3;
  Simulator sim = make_simulator(cfg);
  SimState s = driven_state(sim, 12, 250);

  const std::string path = temp_path("nsmem_ckpt");
  save_checkpoint(path, cfg, s);
  SimConfig stored = checkpoint_config(path);
  CHECK(dump_config(stored) == dump_config(cfg));
  SimState r = load_checkpoint(path, sim);
  CHECK(states_identical(s, r));
  std::remove(path.c_str());
}

TEST_CASE("checkpoint: corrupted payloads are rejected") {
  SimConfig cfg;
  Simulator sim = make_simulator(cfg);
  SimState s = driven_state(sim, 13, 100);
  std::stringstream buf;
  save_checkpoint(buf, cfg, s);
  const std::string full = buf.str();

  // truncated file
  std::stringstream cut(full.substr(0, full.size() / 2));
  CHECK_THROWS_AS(load_checkpoint(cut, sim), std::runtime_error);

  // wrong magic
  std::string bad = full;
  bad[0] = 'X';
  std::stringstream wrong(bad);
  CHECK_THROWS_AS(load_checkpoint(wrong, sim), std::runtime_error);

  // mismatched grid shape
  SimConfig other = cfg;
  other.grid.N = 16;
  Simulator sim16 = make_simulator(other);
  std::stringstream again(full);
  CHECK_THROWS_AS(load_checkpoint(again, sim16), std::runtime_error);
}

// ============================================================================
// State equality discriminates every component
// ============================================================================

TEST_CASE("states_identical: detects single-component drifts") {
  SimConfig cfg;
  cfg.noise.epsilon = 0.5;
  Simulator sim = make_simulator(cfg);
  SimState s = driven_state(sim, 14, 200);

  SimState t = s;
  CHECK(states_identical(s, t));
  t.z = std::nextafter(s.z, 1e300);
  CHECK_FALSE(states_identical(s, t));

  t = s;
  t.n += 1;
  CHECK_FALSE(states_identical(s, t));

  t = s;
  t.v.u1[5] = cplx(std::nextafter(t.v.u1[5].real(), 1e300), t.v.u1[5].imag());
  CHECK_FALSE(states_identical(s, t));

  t = s;
  REQUIRE(!t.eta.ledger.empty());
  t.eta.ledger[0].age += 1e-12;
  CHECK_FALSE(states_identical(s, t));
}
