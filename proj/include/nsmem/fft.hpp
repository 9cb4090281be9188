#pragma once

#include <complex>

namespace nsmem {

/// Unnormalized in-place 2D complex DFT pair for one lattice size.
///
/// forward applies sum_x e^{-ikx} (use with a 1/N^2 factor to analyze),
/// backward applies sum_k e^{+ikx} (synthesis, no factor).  Plan creation is
/// serialized internally; execution on distinct buffers is safe from
/// concurrent threads, so each workspace owns one Dft instance.
class Dft {
 public:
  explicit Dft(int n);
  ~Dft();
  Dft(const Dft&) = delete;
  Dft& operator=(const Dft&) = delete;

  void forward(std::complex<double>* z) const;
  void backward(std::complex<double>* z) const;
  int n() const { return n_; }

 private:
  int n_ = 0;
  void* fwd_ = nullptr;  // fftw_plan kept opaque to avoid leaking fftw3.h
  void* bwd_ = nullptr;
};

}  // namespace nsmem
