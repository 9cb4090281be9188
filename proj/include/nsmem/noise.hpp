#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace nsmem {

/// Stateless counter-based random source (Philox 4x32-10).
///
/// Every draw is a pure function of (seed, stream, counter), so increments of
/// a two-sided Wiener path are reproducible in any evaluation order and a path
/// can be extended backward or forward without disturbing earlier draws.
/// Streams keep independent uses (path increments, field phases, ensembles)
/// from colliding under one seed.
std::array<uint32_t, 4> philox4x32(uint64_t seed, uint32_t stream,
                                   uint64_t counter);

/// Two independent uniforms in (0,1) for one counter.
std::pair<double, double> counter_uniform_pair(uint64_t seed, uint32_t stream,
                                               int64_t counter);

/// Two independent standard normals (Box-Muller) for one counter.
std::pair<double, double> counter_normal_pair(uint64_t seed, uint32_t stream,
                                              int64_t counter);

/// Stream ids used by the library.
inline constexpr uint32_t kStreamWiener = 0;
inline constexpr uint32_t kStreamField = 1;
inline constexpr uint32_t kStreamEnsemble = 2;

/// Lazy two-sided scalar Wiener path on the step lattice t_n = n dt, n in Z.
///
/// Increment n covers [n dt, (n+1) dt] and equals sqrt(dt) times a standard
/// normal that depends only on (seed, n); W(0) = 0 by convention.
struct NoisePath {
  uint64_t seed = 0;
  double dt = 0.0;

  double increment(int64_t n) const;
  /// W(n dt) by signed prefix summation from the origin.
  double value_at(int64_t n) const;
};

/// Materialized samples W(t) for t = n dt over [t0, t1]; t0 and t1 must be
/// integer multiples of dt.  Returns {times, values}.
std::pair<std::vector<double>, std::vector<double>> sample_wiener(
    const NoisePath& path, double t0, double t1);

}  // namespace nsmem
