#include "nsmem/forcing.hpp"

#include <algorithm>
#include <cmath>

namespace nsmem {

Field make_bump_field(const std::shared_ptr<const SpectralGrid>& grid,
                      const BumpSpec& spec) {
  const auto& g = *grid;
  const double w = spec.width > 0.0 ? spec.width : g.L / 20.0;
  const double xc = spec.x_c >= 0.0 ? spec.x_c : 0.5 * g.L;
  const double yc = spec.y_c >= 0.0 ? spec.y_c : 0.5 * g.L;

  PhysicalField p;
  p.grid = grid;
  p.u1.assign(g.size(), 0.0);
  p.u2.assign(g.size(), 0.0);
  const double hstep = g.L / g.N;
  // u = grad^perp psi with psi = A exp(-r^2/(2w^2)); summing the nearest
  // periodic images keeps the samples smooth across the box seam
  for (int i = 0; i < g.N; ++i) {
    for (int j = 0; j < g.N; ++j) {
      const double x = i * hstep, y = j * hstep;
      double u1 = 0.0, u2 = 0.0;
      for (int mx = -1; mx <= 1; ++mx) {
        for (int my = -1; my <= 1; ++my) {
          const double dx = x - xc + mx * g.L;
          const double dy = y - yc + my * g.L;
          const double psi =
              spec.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
          u1 += psi * dy / (w * w);   // -d psi / dy
          u2 += -psi * dx / (w * w);  //  d psi / dx
        }
      }
      p.u1[i * g.N + j] = u1;
      p.u2[i * g.N + j] = u2;
    }
  }
  Field f = analyze(p);
  for (int m = 0; m < g.size(); ++m) {
    if (!g.dealias[m]) f.u1[m] = f.u2[m] = cplx{};
  }
  detail::leray_inplace(f);
  return f;
}

double profile_constant(const Field& h) {
  return std::max({norm_H(h), norm_V(h), norm_W(h)});
}

}  // namespace nsmem
