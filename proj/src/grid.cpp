#include "nsmem/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nsmem {

std::shared_ptr<const SpectralGrid> make_grid(double L, int N) {
  if (!(L > 0.0)) throw std::invalid_argument("make_grid: L must be positive");
  if (N < 8 || (N % 2) != 0)
    throw std::invalid_argument("make_grid: N must be even and at least 8");

  auto g = std::make_shared<SpectralGrid>();
  g->L = L;
  g->N = N;
  g->k0 = 2.0 * std::numbers::pi / L;
  g->lambda1 = g->k0 * g->k0;
  g->wave.resize(N);
  for (int i = 0; i < N; ++i) g->wave[i] = (i < N / 2) ? i : i - N;

  g->ksq.resize(N * N);
  g->dealias.resize(N * N);
  // Keep |wave| <= cut.  When 3 | N the corner product mode 2*(N/3) would
  // alias exactly onto -N/3, so the cut tightens by one to keep quadratic
  // products alias-free on the retained modes; Nyquist is excluded for all N.
  const int cut = (N % 3 == 0) ? N / 3 - 1 : N / 3;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double k1 = g->wave[i] * g->k0;
      const double k2 = g->wave[j] * g->k0;
      g->ksq[i * N + j] = k1 * k1 + k2 * k2;
      g->dealias[i * N + j] =
          (std::abs(g->wave[i]) <= cut && std::abs(g->wave[j]) <= cut) ? 1 : 0;
    }
  }
  return g;
}

}  // namespace nsmem
