#include "nsmem/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsmem/fft.hpp"
#include "nsmem/noise.hpp"

namespace nsmem {

void Field::set_zero() {
  std::fill(u1.begin(), u1.end(), cplx{});
  std::fill(u2.begin(), u2.end(), cplx{});
}

void Field::axpy(double a, const Field& f) {
  const size_t n = u1.size();
  for (size_t m = 0; m < n; ++m) {
    u1[m] += a * f.u1[m];
    u2[m] += a * f.u2[m];
  }
}

void Field::scale(double a) {
  for (auto& c : u1) c *= a;
  for (auto& c : u2) c *= a;
}

namespace detail {

void leray_inplace(Field& u) {
  const auto& g = *u.grid;
  const int N = g.N;
  for (int i = 0; i < N; ++i) {
    const double k1 = g.wave[i] * g.k0;
    for (int j = 0; j < N; ++j) {
      const int m = i * N + j;
      const double k2 = g.wave[j] * g.k0;
      const double kk = g.ksq[m];
      if (kk == 0.0) {
        u.u1[m] = u.u2[m] = cplx{};
        continue;
      }
      const cplx kd = (k1 * u.u1[m] + k2 * u.u2[m]) / kk;
      u.u1[m] -= k1 * kd;
      u.u2[m] -= k2 * kd;
    }
  }
}

}  // namespace detail

Field leray_project(const Field& u) {
  Field r = u;
  detail::leray_inplace(r);
  return r;
}

Field stokes_apply(const Field& u, int r) {
  Field out = u;
  const auto& g = *u.grid;
  const int n = g.size();
  for (int m = 0; m < n; ++m) {
    const double kk = g.ksq[m];
    double w = 0.0;
    if (kk > 0.0) w = std::pow(std::sqrt(kk), r);
    out.u1[m] *= w;
    out.u2[m] *= w;
  }
  return out;
}

namespace {

double weighted_sq(const Field& u, int pow_ksq) {
  const auto& g = *u.grid;
  const int n = g.size();
  double s = 0.0;
  for (int m = 0; m < n; ++m) {
    double w = 1.0;
    for (int p = 0; p < pow_ksq; ++p) w *= g.ksq[m];
    s += w * (std::norm(u.u1[m]) + std::norm(u.u2[m]));
  }
  return g.L * g.L * s;
}

}  // namespace

double inner_H(const Field& u, const Field& v) {
  const auto& g = *u.grid;
  const int n = g.size();
  double s = 0.0;
  for (int m = 0; m < n; ++m)
    s += (u.u1[m] * std::conj(v.u1[m]) + u.u2[m] * std::conj(v.u2[m])).real();
  return g.L * g.L * s;
}

double norm_H(const Field& u) { return std::sqrt(weighted_sq(u, 0)); }
double norm_V(const Field& u) { return std::sqrt(weighted_sq(u, 1)); }
double norm_W(const Field& u) { return std::sqrt(weighted_sq(u, 2)); }

double max_divergence(const Field& u) {
  const auto& g = *u.grid;
  const int N = g.N;
  double worst = 0.0;
  for (int i = 0; i < N; ++i) {
    const double k1 = g.wave[i] * g.k0;
    for (int j = 0; j < N; ++j) {
      const double k2 = g.wave[j] * g.k0;
      const int m = i * N + j;
      worst = std::max(worst, std::abs(k1 * u.u1[m] + k2 * u.u2[m]));
    }
  }
  return worst;
}

PhysicalField synthesize(const Field& u) {
  const auto& g = *u.grid;
  Dft dft(g.N);
  PhysicalField p;
  p.grid = u.grid;
  p.u1.resize(g.size());
  p.u2.resize(g.size());
  std::vector<cplx> buf(u.u1);
  dft.backward(buf.data());
  for (int m = 0; m < g.size(); ++m) p.u1[m] = buf[m].real();
  buf = u.u2;
  dft.backward(buf.data());
  for (int m = 0; m < g.size(); ++m) p.u2[m] = buf[m].real();
  return p;
}

Field analyze(const PhysicalField& p) {
  const auto& g = *p.grid;
  Dft dft(g.N);
  Field f(p.grid);
  const double inv = 1.0 / static_cast<double>(g.size());
  std::vector<cplx> buf(g.size());
  for (int m = 0; m < g.size(); ++m) buf[m] = p.u1[m];
  dft.forward(buf.data());
  for (int m = 0; m < g.size(); ++m) f.u1[m] = buf[m] * inv;
  for (int m = 0; m < g.size(); ++m) buf[m] = p.u2[m];
  dft.forward(buf.data());
  for (int m = 0; m < g.size(); ++m) f.u2[m] = buf[m] * inv;
  f.u1[0] = f.u2[0] = cplx{};  // mean-free space
  return f;
}

Field random_field(const std::shared_ptr<const SpectralGrid>& grid,
                   uint64_t seed, double p) {
  const auto& g = *grid;
  const int N = g.N;
  Field f(grid);
  // Each divergence-free mode is a multiple of the unit vector k_perp/|k|;
  // filling conjugate pairs together keeps the field real.  The Nyquist row
  // and column are left empty so every mode has a clean conjugate partner.
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const int wi = g.wave[i], wj = g.wave[j];
      if (wi == -N / 2 || wj == -N / 2) continue;
      if (wi < 0 || (wi == 0 && wj <= 0)) continue;  // half-space representative
      const int m = i * N + j;
      const double kk = g.ksq[m];
      const double amp = std::pow(1.0 + kk, -0.5 * p);
      const auto [z1, z2] = counter_normal_pair(
          seed, kStreamField, static_cast<int64_t>(i) * N + j);
      const cplx zeta = amp * cplx(z1, z2);
      const double k1 = wi * g.k0, k2 = wj * g.k0;
      const double kmag = std::sqrt(kk);
      const double p1 = -k2 / kmag, p2 = k1 / kmag;  // k_perp / |k|
      f.u1[m] = zeta * p1;
      f.u2[m] = zeta * p2;
      const int mi = ((N - i) % N) * N + ((N - j) % N);
      f.u1[mi] = std::conj(f.u1[m]);
      f.u2[mi] = std::conj(f.u2[m]);
    }
  }
  const double h = norm_H(f);
  if (h > 0.0) f.scale(1.0 / h);
  return f;
}

}  // namespace nsmem
