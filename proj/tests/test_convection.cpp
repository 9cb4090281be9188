/// @file test_convection.cpp
/// @brief Nonlinear-term identities and the direct-summation oracle.
///
/// The dealiased pseudo-spectral transport term must reproduce the algebraic
/// structure of the continuous operator: b(u,v,v) = 0 and antisymmetry in the
/// last two slots for divergence-free advecting fields, and the product must
/// agree with an FFT-free direct convolution over the retained modes.  These
/// pin down masking mistakes, normalization slips and projection ordering.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "nsmem/checks.hpp"
#include "nsmem/convection.hpp"
#include "nsmem/field.hpp"
#include "nsmem/grid.hpp"

using namespace nsmem;

namespace {

std::shared_ptr<const SpectralGrid> unit_grid(int N) {
  return make_grid(2.0 * M_PI, N);
}

double field_diff(const Field& a, const Field& b) {
  double worst = 0.0;
  for (size_t m = 0; m < a.u1.size(); ++m) {
    worst = std::max(worst, std::abs(a.u1[m] - b.u1[m]));
    worst = std::max(worst, std::abs(a.u2[m] - b.u2[m]));
  }
  return worst;
}

}  // namespace

// ============================================================================
// Trilinear cancellation and antisymmetry
// ============================================================================

TEST_CASE("trilinear: b(u,v,v) vanishes for divergence-free u") {
  auto g = unit_grid(32);
  ConvectionWorkspace ws(g);
  for (int trial = 0; trial < 25; ++trial) {
    Field u = random_field(g, 100 + 3 * trial, 2.5);
    Field v = random_field(g, 101 + 3 * trial, 2.5);
    const double scale = norm_V(u) * norm_V(v) * norm_V(v);
    CHECK(std::abs(ws.trilinear_b(u, v, v)) < 1e-10 * scale);
  }
}

TEST_CASE("trilinear: antisymmetry b(u,v,w) = -b(u,w,v)") {
  auto g = unit_grid(32);
  ConvectionWorkspace ws(g);
  for (int trial = 0; trial < 25; ++trial) {
    Field u = random_field(g, 300 + 3 * trial, 2.5);
    Field v = random_field(g, 301 + 3 * trial, 2.5);
    Field w = random_field(g, 302 + 3 * trial, 2.5);
    const double bvw = ws.trilinear_b(u, v, w);
    const double bwv = ws.trilinear_b(u, w, v);
    const double scale = norm_V(u) * norm_V(v) * norm_V(w);
    CHECK(std::abs(bvw + bwv) < 1e-10 * scale);
  }
}

TEST_CASE("trilinear: pairing with the projected bilinear term") {
  // b(u,v,w) = <B(u,v), w>_H for divergence-free w, since the projection
  // drops only gradient parts orthogonal to w.
  auto g = unit_grid(32);
  ConvectionWorkspace ws(g);
  Field u = random_field(g, 501, 2.5);
  Field v = random_field(g, 502, 2.5);
  Field w = random_field(g, 503, 2.5);
  Field Buv(g);
  ws.bilinear_B(u, v, Buv);
  const double lhs = ws.trilinear_b(u, v, w);
  const double rhs = inner_H(Buv, w);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

// ============================================================================
// Direct-summation oracle
// ============================================================================

TEST_CASE("bilinear: matches the O(N^4) mode-summation reference at N=16") {
  auto g = unit_grid(16);
  ConvectionWorkspace ws(g);
  for (int trial = 0; trial < 5; ++trial) {
    Field u = random_field(g, 800 + trial, 1.5);
    Field v = random_field(g, 900 + trial, 1.5);
    Field fast(g);
    ws.bilinear_B(u, v, fast);
    Field slow = direct_bilinear_oracle(u, v);
    const double rel = field_diff(fast, slow) / std::max(norm_H(fast), 1e-300);
    CHECK(rel < 1e-12);
  }
}

TEST_CASE("bilinear: output is divergence-free and dealiased") {
  auto g = unit_grid(32);
  ConvectionWorkspace ws(g);
  Field u = random_field(g, 71, 2.0);
  Field v = random_field(g, 72, 2.0);
  Field out(g);
  ws.bilinear_B(u, v, out);
  CHECK(max_divergence(out) < 1e-12 * std::max(norm_V(out), 1.0));
  for (int m = 0; m < g->size(); ++m)
    if (!g->dealias[m]) {
      CHECK(std::abs(out.u1[m]) == 0.0);
      CHECK(std::abs(out.u2[m]) == 0.0);
    }
}

TEST_CASE("bilinear: single-mode pair lands on the analytic convolution") {
  // u = curl-free-free pair with one wave each: (u . grad) v has exactly the
  // sum and difference wavevectors before projection.
  auto g = unit_grid(16);
  Field u(g), v(g);
  // u from stream mode (1,0): u = (0, sin x) -> u2 = (e^{ix} - e^{-ix})/(2i)
  u.u2[g->idx(1, 0)] = cplx(0.0, -0.5);
  u.u2[g->idx(15, 0)] = cplx(0.0, 0.5);
  // v from stream mode (0,2): v = (sin 2y, 0) style
  v.u1[g->idx(0, 2)] = cplx(0.0, -0.5);
  v.u1[g->idx(0, 14)] = cplx(0.0, 0.5);
  Field fast = bilinear_B(u, v);
  Field slow = direct_bilinear_oracle(u, v);
  CHECK(field_diff(fast, slow) < 1e-14);
  // energy sits only on |k1| = 1, |k2| = 2 combinations
  double off = 0.0;
  for (int i = 0; i < g->N; ++i)
    for (int j = 0; j < g->N; ++j) {
      const int a = std::abs(g->wave[i]), b = std::abs(g->wave[j]);
      if (a == 1 && b == 2) continue;
      off = std::max(off, std::abs(fast.u1[g->idx(i, j)]));
      off = std::max(off, std::abs(fast.u2[g->idx(i, j)]));
    }
  CHECK(off < 1e-15);
}

// ============================================================================
// Mode truncation helper
// ============================================================================

TEST_CASE("truncate_modes: keeps the low block exactly and zeroes the rest") {
  auto g = unit_grid(32);
  Field u = random_field(g, 64, 2.0);
  Field t = truncate_modes(u, 4);
  for (int i = 0; i < g->N; ++i)
    for (int j = 0; j < g->N; ++j) {
      const int id = g->idx(i, j);
      if (std::abs(g->wave[i]) <= 4 && std::abs(g->wave[j]) <= 4) {
        CHECK(t.u1[id] == u.u1[id]);
      } else {
        CHECK(std::abs(t.u1[id]) == 0.0);
        CHECK(std::abs(t.u2[id]) == 0.0);
      }
    }
}

// ============================================================================
// Interpolation-bound constant
// ============================================================================

TEST_CASE("ladyzhenskaya: measured constant is positive, finite, deterministic") {
  auto g = unit_grid(32);
  const double c1 = measure_ladyzhenskaya_constant(g, 40, 2024);
  const double c2 = measure_ladyzhenskaya_constant(g, 40, 2024);
  CHECK(c1 == c2);
  CHECK(c1 > 0.0);
  CHECK(c1 < 10.0);
  // more trials can only raise the observed maximum
  const double c3 = measure_ladyzhenskaya_constant(g, 80, 2024);
  CHECK(c3 >= c1);
}
