#include "nsmem/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace nsmem {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Dft::Dft(int n) : n_(n) {
  // A scratch buffer is used only to create the plans; execution always goes
  // through the new-array interface.  FFTW_UNALIGNED keeps std::vector storage
  // legal regardless of its alignment.
  std::vector<std::complex<double>> scratch(static_cast<size_t>(n) * n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(plan_mutex());
  fwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Dft::~Dft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Dft::forward(std::complex<double>* z) const {
  auto* p = reinterpret_cast<fftw_complex*>(z);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Dft::backward(std::complex<double>* z) const {
  auto* p = reinterpret_cast<fftw_complex*>(z);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

}  // namespace nsmem
