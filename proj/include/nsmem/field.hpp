#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nsmem/grid.hpp"

namespace nsmem {

/// Two-component velocity-type field in spectral form.
///
/// Valid fields are Hermitian-symmetric (real in physical space), mean-free
/// (uhat(0) = 0) and, where stated, divergence-free: |k . uhat(k)| stays below
/// 1e-12 * ||u||_V for every mode.
struct Field {
  std::shared_ptr<const SpectralGrid> grid;
  std::vector<cplx> u1, u2;

  Field() = default;
  explicit Field(std::shared_ptr<const SpectralGrid> g)
      : grid(std::move(g)), u1(grid->size()), u2(grid->size()) {}

  void set_zero();
  /// this += a * f (grids must match)
  void axpy(double a, const Field& f);
  /// this *= a
  void scale(double a);
};

/// Physical-space samples on the N x N lattice, x_j = j L / N.
struct PhysicalField {
  std::shared_ptr<const SpectralGrid> grid;
  std::vector<double> u1, u2;
};

/// Projects onto divergence-free modes: uhat -= k (k . uhat)/|k|^2; also
/// zeroes the mean mode.  Idempotent.
Field leray_project(const Field& u);

/// Multiplies each mode by |k|^r (the Stokes operator is r = 2, its square
/// root r = 1).  Negative r leaves the zero mode at zero.
Field stokes_apply(const Field& u, int r);

/// <u,v>_H = L^2 Re sum_k uhat . conj(vhat)
double inner_H(const Field& u, const Field& v);
double norm_H(const Field& u);  ///< sqrt(<u,u>_H)
double norm_V(const Field& u);  ///< weight |k|^2 under the sum
double norm_W(const Field& u);  ///< weight |k|^4 under the sum

/// Largest divergence magnitude over modes, max_k |k . uhat(k)|.
double max_divergence(const Field& u);

/// Spectral -> physical samples (exact inverse of analyze up to roundoff).
PhysicalField synthesize(const Field& u);

/// Physical samples -> spectral; the mean mode is dropped so the result lies
/// in the mean-free space H.
Field analyze(const PhysicalField& p);

/// Reproducible divergence-free field with smooth spectrum
/// |uhat(k)| ~ (1+|k|^2)^{-p/2}, random phases drawn from `seed`, normalized
/// to unit H-norm.
Field random_field(const std::shared_ptr<const SpectralGrid>& grid,
                   uint64_t seed, double p);

namespace detail {
/// In-place Leray projection used by hot paths.
void leray_inplace(Field& u);
}  // namespace detail

}  // namespace nsmem
