/// @file test_spectral.cpp
/// @brief Grid, transform and projection invariants.
///
/// Catches mode-layout mistakes, lost Hermitian symmetry, projection bugs
/// and norm-weight errors by checking identities that any correct spectral
/// representation satisfies: transform round-trips, Parseval, Leray
/// idempotence at roundoff, exact removal of gradient parts, and the
/// monotone nesting of the H/V/W norms on the unit-box lattice.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "nsmem/field.hpp"
#include "nsmem/grid.hpp"

using namespace nsmem;

namespace {

std::shared_ptr<const SpectralGrid> unit_grid(int N = 32) {
  return make_grid(2.0 * M_PI, N);
}

/// Pure gradient field (i k1, i k2) phi built from the scalar spectrum of a
/// seed field; Leray must remove it exactly.
Field raw_gradient(const Field& src) {
  const auto& g = *src.grid;
  Field out(src.grid);
  for (int i = 0; i < g.N; ++i) {
    for (int j = 0; j < g.N; ++j) {
      const int id = g.idx(i, j);
      const cplx phi = src.u1[id];
      out.u1[id] = cplx(0.0, g.k0 * g.wave[i]) * phi;
      out.u2[id] = cplx(0.0, g.k0 * g.wave[j]) * phi;
    }
  }
  return out;
}

}  // namespace

// ============================================================================
// Grid construction
// ============================================================================

TEST_CASE("grid: layout and validation") {
  auto g = unit_grid(16);
  CHECK(g->N == 16);
  CHECK(g->k0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g->lambda1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g->wave[0] == 0);
  CHECK(g->wave[1] == 1);
  CHECK(g->wave[7] == 7);
  CHECK(g->wave[8] == -8);
  CHECK(g->wave[15] == -1);
  // |k|^2 at (1, 0) and at the corner
  CHECK(g->ksq[g->idx(1, 0)] == doctest::Approx(1.0));
  CHECK(g->ksq[g->idx(8, 8)] == doctest::Approx(128.0));

  CHECK_THROWS_AS(make_grid(0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 15), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 4), std::invalid_argument);
}

TEST_CASE("grid: dealias mask is the square 2/3 cut without Nyquist") {
  auto g = unit_grid(16);
  const int cut = 16 / 3;  // N%3 != 0: cut = floor(N/3) = 5
  for (int i = 0; i < g->N; ++i) {
    for (int j = 0; j < g->N; ++j) {
      const bool keep = std::abs(g->wave[i]) <= cut && std::abs(g->wave[j]) <= cut;
      CHECK(int(g->dealias[g->idx(i, j)]) == (keep ? 1 : 0));
    }
  }

  auto g24 = unit_grid(24);  // N%3 == 0: cut = N/3 - 1 = 7
  int kept_max = 0;
  for (int i = 0; i < g24->N; ++i)
    if (g24->dealias[g24->idx(i, 0)]) kept_max = std::max(kept_max, std::abs(g24->wave[i]));
  CHECK(kept_max == 7);
}

// ============================================================================
// Transform round-trips
// ============================================================================

TEST_CASE("transform: analyze(synthesize(u)) returns u to roundoff") {
  auto g = unit_grid(32);
  Field u = random_field(g, 7, 2.0);
  PhysicalField p = synthesize(u);
  Field back = analyze(p);
  double worst = 0.0;
  for (int m = 0; m < g->size(); ++m) {
    worst = std::max(worst, std::abs(back.u1[m] - u.u1[m]));
    worst = std::max(worst, std::abs(back.u2[m] - u.u2[m]));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("transform: physical samples of a single mode match the analytic wave") {
  auto g = unit_grid(16);
  Field u(g);
  // u1 = 2 cos(3x + 2y) means coefficients 1 at k = (3,2) and (-3,-2)
  u.u1[g->idx(3, 2)] = cplx(1.0, 0.0);
  u.u1[g->idx(16 - 3, 16 - 2)] = cplx(1.0, 0.0);
  PhysicalField p = synthesize(u);
  const double hx = g->L / g->N;
  double worst = 0.0;
  for (int i = 0; i < g->N; ++i)
    for (int j = 0; j < g->N; ++j) {
      const double expect = 2.0 * std::cos(3.0 * i * hx + 2.0 * j * hx);
      worst = std::max(worst, std::abs(p.u1[size_t(i) * g->N + j] - expect));
    }
  CHECK(worst < 1e-13);
}

TEST_CASE("transform: Parseval ties the H norm to the lattice sum") {
  auto g = unit_grid(32);
  Field u = random_field(g, 21, 2.5);
  PhysicalField p = synthesize(u);
  const double cell = (g->L / g->N) * (g->L / g->N);
  double phys = 0.0;
  for (size_t m = 0; m < p.u1.size(); ++m)
    phys += (p.u1[m] * p.u1[m] + p.u2[m] * p.u2[m]) * cell;
  CHECK(norm_H(u) * norm_H(u) == doctest::Approx(phys).epsilon(1e-12));
}

// ============================================================================
// Leray projection
// ============================================================================

TEST_CASE("projection: idempotent at roundoff and annihilates gradients") {
  auto g = unit_grid(32);
  Field u = random_field(g, 3, 2.0);

  Field once = leray_project(u);
  Field twice = leray_project(once);
  double idem = 0.0;
  for (int m = 0; m < g->size(); ++m) {
    idem = std::max(idem, std::abs(twice.u1[m] - once.u1[m]));
    idem = std::max(idem, std::abs(twice.u2[m] - once.u2[m]));
  }
  CHECK(idem < 1e-14);
  CHECK(max_divergence(once) < 1e-12 * std::max(norm_V(once), 1.0));

  Field grad = raw_gradient(random_field(g, 4, 2.0));
  Field killed = leray_project(grad);
  CHECK(norm_H(killed) < 1e-13 * std::max(norm_H(grad), 1.0));
}

TEST_CASE("projection: divergence-free fields pass through unchanged") {
  auto g = unit_grid(32);
  Field u = random_field(g, 9, 3.0);  // already projected by construction
  Field pu = leray_project(u);
  double diff = 0.0;
  for (int m = 0; m < g->size(); ++m) {
    diff = std::max(diff, std::abs(pu.u1[m] - u.u1[m]));
    diff = std::max(diff, std::abs(pu.u2[m] - u.u2[m]));
  }
  CHECK(diff < 1e-14);
}

TEST_CASE("projection: zero mode is removed") {
  auto g = unit_grid(16);
  Field u(g);
  u.u1[0] = cplx(3.0, 0.0);
  u.u2[0] = cplx(-1.0, 0.0);
  u.u1[g->idx(1, 0)] = cplx(0.0, 0.5);
  Field pu = leray_project(u);
  CHECK(std::abs(pu.u1[0]) == 0.0);
  CHECK(std::abs(pu.u2[0]) == 0.0);
}

// ============================================================================
// Norms and the Stokes multiplier
// ============================================================================

TEST_CASE("norms: H <= V <= W on the unit-wavenumber box") {
  auto g = unit_grid(32);
  Field u = random_field(g, 5, 2.0);
  CHECK(norm_H(u) <= norm_V(u) + 1e-14);
  CHECK(norm_V(u) <= norm_W(u) + 1e-14);
  CHECK(norm_H(u) == doctest::Approx(1.0).epsilon(1e-12));  // random_field normalizes
}

TEST_CASE("norms: stokes_apply shifts the weight exactly") {
  auto g = unit_grid(32);
  Field u = random_field(g, 6, 3.0);
  Field au = stokes_apply(u, 1);
  CHECK(norm_H(au) == doctest::Approx(norm_V(u)).epsilon(1e-13));
  Field a2u = stokes_apply(u, 2);
  CHECK(norm_H(a2u) == doctest::Approx(norm_W(u)).epsilon(1e-13));

  // A^{1/2} composed twice equals A
  Field comp = stokes_apply(au, 1);
  double diff = 0.0;
  for (int m = 0; m < g->size(); ++m)
    diff = std::max(diff, std::abs(comp.u1[m] - a2u.u1[m]));
  CHECK(diff < 1e-12);
}

TEST_CASE("norms: inner_H is symmetric and matches norm_H") {
  auto g = unit_grid(16);
  Field u = random_field(g, 31, 2.0);
  Field v = random_field(g, 32, 2.0);
  CHECK(inner_H(u, v) == doctest::Approx(inner_H(v, u)).epsilon(1e-14));
  CHECK(inner_H(u, u) == doctest::Approx(norm_H(u) * norm_H(u)).epsilon(1e-13));
}

// ============================================================================
// Reproducible random fields
// ============================================================================

TEST_CASE("random_field: deterministic in the seed, distinct across seeds") {
  auto g = unit_grid(32);
  Field a = random_field(g, 123, 2.0);
  Field b = random_field(g, 123, 2.0);
  Field c = random_field(g, 124, 2.0);
  double same = 0.0, other = 0.0;
  for (int m = 0; m < g->size(); ++m) {
    same = std::max(same, std::abs(a.u1[m] - b.u1[m]));
    other = std::max(other, std::abs(a.u1[m] - c.u1[m]));
  }
  CHECK(same == 0.0);
  CHECK(other > 1e-3);
  CHECK(max_divergence(a) < 1e-12 * std::max(norm_V(a), 1.0));
  // Hermitian symmetry: physical samples carry no imaginary leakage, which
  // analyze would fold into differences from the original coefficients.
  PhysicalField p = synthesize(a);
  Field back = analyze(p);
  double drift = 0.0;
  for (int m = 0; m < g->size(); ++m)
    drift = std::max(drift, std::abs(back.u1[m] - a.u1[m]));
  CHECK(drift < 1e-14);
}

TEST_CASE("field: axpy and scale are exact linear updates") {
  auto g = unit_grid(16);
  Field u = random_field(g, 41, 2.0);
  Field v = random_field(g, 42, 2.0);
  Field w = u;
  w.axpy(2.5, v);
  w.scale(0.5);
  double diff = 0.0;
  for (int m = 0; m < g->size(); ++m) {
    const cplx expect = 0.5 * (u.u1[m] + 2.5 * v.u1[m]);
    diff = std::max(diff, std::abs(w.u1[m] - expect));
  }
  CHECK(diff < 1e-15);
}
