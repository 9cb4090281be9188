#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace nsmem {

using cplx = std::complex<double>;

/// Fourier description of the periodic box [0,L)^2 sampled on an N x N lattice.
///
/// Mode layout is row-major with FFT index order: entry (i,j) holds the
/// coefficient of exp(i(k1 x + k2 y)) with k1 = wave(i)*2*pi/L and integer
/// wave(i) in {0,...,N/2-1, -N/2,...,-1}.  Coefficients follow the convention
/// u(x) = sum_k uhat(k) e^{ikx}, so <u,v>_H = L^2 sum_k uhat conj(vhat).
struct SpectralGrid {
  double L = 0.0;           ///< box side length
  int N = 0;                ///< lattice points per axis (even, >= 8)
  double k0 = 0.0;          ///< fundamental wavenumber 2*pi/L
  double lambda1 = 0.0;     ///< smallest Stokes eigenvalue k0^2
  std::vector<int> wave;    ///< integer wavenumber per FFT index, size N
  std::vector<double> ksq;  ///< |k|^2 per mode, size N*N
  std::vector<uint8_t> dealias;  ///< 1 where |k_i| <= k0*N/3 on both axes

  int size() const { return N * N; }
  int idx(int i, int j) const { return i * N + j; }
};

/// Builds an immutable grid; throws std::invalid_argument unless L > 0 and
/// N is even with N >= 8.
std::shared_ptr<const SpectralGrid> make_grid(double L, int N);

}  // namespace nsmem
