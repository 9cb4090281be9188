#include "nsmem/noise.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nsmem {

namespace {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

// Signed counters map to distinct unsigned ones: 0,-1,1,-2,... -> 0,1,2,3,...
inline uint64_t zigzag(int64_t n) {
  return (static_cast<uint64_t>(n) << 1) ^ static_cast<uint64_t>(n >> 63);
}

inline double to_unit(uint32_t a, uint32_t b) {
  const uint64_t x = (static_cast<uint64_t>(a) << 32) | b;
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;  // in (0,1)
}

}  // namespace

std::array<uint32_t, 4> philox4x32(uint64_t seed, uint32_t stream,
                                   uint64_t counter) {
  constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  uint32_t c0 = static_cast<uint32_t>(counter);
  uint32_t c1 = static_cast<uint32_t>(counter >> 32);
  uint32_t c2 = stream;
  uint32_t c3 = 0u;
  uint32_t k0 = static_cast<uint32_t>(seed);
  uint32_t k1 = static_cast<uint32_t>(seed >> 32);
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(M0, c0, hi0, lo0);
    mulhilo(M1, c2, hi1, lo1);
    const uint32_t n0 = hi1 ^ c1 ^ k0;
    const uint32_t n1 = lo1;
    const uint32_t n2 = hi0 ^ c3 ^ k1;
    const uint32_t n3 = lo0;
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    k0 += W0; k1 += W1;
  }
  return {c0, c1, c2, c3};
}

std::pair<double, double> counter_uniform_pair(uint64_t seed, uint32_t stream,
                                               int64_t counter) {
  const auto w = philox4x32(seed, stream, zigzag(counter));
  return {to_unit(w[0], w[1]), to_unit(w[2], w[3])};
}

std::pair<double, double> counter_normal_pair(uint64_t seed, uint32_t stream,
                                              int64_t counter) {
  const auto [u1, u2] = counter_uniform_pair(seed, stream, counter);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

double NoisePath::increment(int64_t n) const {
  return std::sqrt(dt) * counter_normal_pair(seed, kStreamWiener, n).first;
}

double NoisePath::value_at(int64_t n) const {
  double w = 0.0;
  if (n >= 0) {
    for (int64_t j = 0; j < n; ++j) w += increment(j);
  } else {
    for (int64_t j = n; j < 0; ++j) w -= increment(j);
  }
  return w;
}

std::pair<std::vector<double>, std::vector<double>> sample_wiener(
    const NoisePath& path, double t0, double t1) {
  if (!(path.dt > 0.0)) throw std::invalid_argument("sample_wiener: dt <= 0");
  const double n0d = t0 / path.dt, n1d = t1 / path.dt;
  const auto n0 = static_cast<int64_t>(std::llround(n0d));
  const auto n1 = static_cast<int64_t>(std::llround(n1d));
  constexpr double align_tol = 1e-9;
  if (std::abs(n0d - static_cast<double>(n0)) > align_tol ||
      std::abs(n1d - static_cast<double>(n1)) > align_tol)
    throw std::invalid_argument("sample_wiener: t0, t1 must be multiples of dt");
  if (n1 < n0) throw std::invalid_argument("sample_wiener: t1 < t0");

  std::vector<double> times, values;
  times.reserve(n1 - n0 + 1);
  values.reserve(n1 - n0 + 1);
  double w = path.value_at(n0);
  for (int64_t n = n0; n <= n1; ++n) {
    times.push_back(static_cast<double>(n) * path.dt);
    values.push_back(w);
    if (n < n1) w += path.increment(n);
  }
  return {std::move(times), std::move(values)};
}

}  // namespace nsmem
