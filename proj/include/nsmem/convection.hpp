#pragma once

#include <cstdint>
#include <memory>

#include "nsmem/fft.hpp"
#include "nsmem/field.hpp"

namespace nsmem {

/// Scratch space and FFT plans for the convective terms on one grid.
///
/// Not thread-safe; concurrent integrations give each thread its own
/// workspace.  All evaluations mask inputs and products with the 2/3-rule
/// so the discrete form satisfies the continuous cancellation identities.
class ConvectionWorkspace {
 public:
  explicit ConvectionWorkspace(std::shared_ptr<const SpectralGrid> grid);

  const std::shared_ptr<const SpectralGrid>& grid() const { return grid_; }

  /// out = P (u . grad) v, dealiased and Leray-projected.
  void bilinear_B(const Field& u, const Field& v, Field& out);

  /// b(u,v,w) = sum_ij integral u_i d_i v_j w_j dx on the dealiased modes.
  /// For divergence-free u this satisfies b(u,v,v) = 0 and
  /// b(u,v,w) = -b(u,w,v).
  double trilinear_b(const Field& u, const Field& v, const Field& w);

 private:
  /// Computes the masked product field (u . grad v) in spectral form into
  /// prod_; no projection.
  void product(const Field& u, const Field& v);

  std::shared_ptr<const SpectralGrid> grid_;
  Dft dft_;
  std::vector<cplx> s1_, s2_;               // masked spectral scratch
  std::vector<double> pu1_, pu2_;           // advecting velocity samples
  std::vector<double> d11_, d21_, d12_, d22_;  // derivative samples d_i v_j
  Field prod_;
};

/// Convenience wrappers that build a transient workspace.
Field bilinear_B(const Field& u, const Field& v);
double trilinear_b(const Field& u, const Field& v, const Field& w);

/// Empirical constant for the bound
/// |b(u,v,w)| <= c ||u||^{1/2} ||A^{1/2}u||^{1/2} ||A^{1/2}v||^{1/2}
///               ||Av||^{1/2} ||w||.
/// Returns the largest observed ratio over `trials` random triples
/// (trials >= 100 recommended); deterministic in `seed`.
double measure_ladyzhenskaya_constant(
    const std::shared_ptr<const SpectralGrid>& grid, int trials,
    uint64_t seed);

}  // namespace nsmem
