#include "nsmem/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nsmem/ou.hpp"

namespace nsmem {

namespace {

/// Minimal-image squared distance to (x_c, y_c) on the periodic box.
double torus_dist2(double x, double y, double x_c, double y_c, double L) {
  double dx = std::fmod(x - x_c, L);
  double dy = std::fmod(y - y_c, L);
  if (dx > 0.5 * L) dx -= L;
  if (dx < -0.5 * L) dx += L;
  if (dy > 0.5 * L) dy -= L;
  if (dy < -0.5 * L) dy += L;
  return dx * dx + dy * dy;
}

/// Weight samples w(x_ij) on the lattice for a radial profile of the squared
/// distance.
template <typename F>
std::vector<double> radial_weight(const SpectralGrid& g, double x_c,
                                  double y_c, F&& w_of_d2) {
  std::vector<double> w(static_cast<size_t>(g.size()));
  const double hx = g.L / g.N;
  for (int i = 0; i < g.N; ++i) {
    const double x = i * hx;
    for (int j = 0; j < g.N; ++j) {
      const double y = j * hx;
      w[static_cast<size_t>(g.idx(i, j))] =
          w_of_d2(torus_dist2(x, y, x_c, y_c, g.L));
    }
  }
  return w;
}

/// (L/N)^2 sum w |u|^2 over the lattice.
double weighted_square(const PhysicalField& p, const std::vector<double>& w) {
  const auto& g = *p.grid;
  const double cell = (g.L / g.N) * (g.L / g.N);
  double acc = 0.0;
  for (size_t i = 0; i < w.size(); ++i)
    acc += w[i] * (p.u1[i] * p.u1[i] + p.u2[i] * p.u2[i]);
  return cell * acc;
}

/// x- and y-derivative fields of a two-component spectral field.
void gradient_fields(const Field& u, Field& gx, Field& gy) {
  const auto& g = *u.grid;
  const double k0 = g.k0;
  const cplx iu(0.0, 1.0);
  for (int i = 0; i < g.N; ++i) {
    const double k1 = k0 * g.wave[i];
    for (int j = 0; j < g.N; ++j) {
      const double k2 = k0 * g.wave[j];
      const int id = g.idx(i, j);
      gx.u1[id] = iu * k1 * u.u1[id];
      gx.u2[id] = iu * k1 * u.u2[id];
      gy.u1[id] = iu * k2 * u.u1[id];
      gy.u2[id] = iu * k2 * u.u2[id];
    }
  }
}

/// integral w |v|^2 dx + sum_j w_j integral w |grad eta(s_j)|^2 dx.
double weighted_energy(const Field& v, const HistoryState& eta,
                       const std::vector<double>& w) {
  double total = weighted_square(synthesize(v), w);
  const auto& hg = *eta.hgrid;
  Field gx(v.grid), gy(v.grid);
  for (size_t j = 0; j < hg.s_nodes.size(); ++j) {
    const Field ej = history_at(eta, hg.s_nodes[j]);
    gradient_fields(ej, gx, gy);
    const double ex = weighted_square(synthesize(gx), w);
    const double ey = weighted_square(synthesize(gy), w);
    total += hg.quad_weights[j] * (ex + ey);
  }
  return total;
}

/// Exponential moments for the product trapezoid on one segment:
/// i0 = int_0^1 e^{theta x} dx and i1 = int_0^1 x e^{theta x} dx.
void exp_moments(double theta, double& i0, double& i1) {
  if (std::abs(theta) < 0.5) {
    double term = 1.0;
    i0 = 0.0;
    i1 = 0.0;
    for (int n = 0; n < 16; ++n) {
      i0 += term / (n + 1);
      i1 += term / (n + 2);
      term *= theta / (n + 1);
    }
  } else {
    i0 = std::expm1(theta) / theta;
    i1 = (theta * std::exp(theta) - std::expm1(theta)) / (theta * theta);
  }
}

}  // namespace

double energy_H(const SimState& s) {
  const double a = norm_H(s.v);
  const double b = norm_M(s.eta);
  return a * a + b * b;
}

double energy_H1(const SimState& s) {
  const double a = norm_V(s.v);
  const double b = norm_M1(s.eta);
  return a * a + b * b;
}

double free_constant(const ConstantsLedger& lc, double kappa, double f_norm_H,
                     double epsilon) {
  const double inv = 1.0 / (lc.nu * lc.lambda1);
  const double forcing = 8.0 * inv * f_norm_H * f_norm_H;
  double noise = 0.0;
  if (epsilon > 0.0) {
    const double ct2 = lc.c_tilde * lc.c_tilde;
    noise = 2.0 * kappa * ct2 / lc.delta +
            2.0 * lc.c_hat * lc.c_hat * ct2 * ct2 * inv +
            16.0 * (lc.sigma * lc.sigma + lc.nu * lc.nu) * ct2 * inv;
  }
  return 2.0 * std::max(forcing, noise);
}

ResidualReport dissipation_residual(const std::vector<TrajectorySample>& steps,
                                    const ConstantsLedger& lc, double epsilon,
                                    double c_free, double tol) {
  ResidualReport rep;
  rep.c_free = c_free;
  rep.tol = tol;
  if (steps.size() < 2) return rep;

  const double e2 = epsilon * epsilon;
  rep.t.reserve(steps.size() - 1);
  rep.residual.reserve(steps.size() - 1);
  double scale = 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (size_t n = 0; n + 1 < steps.size(); ++n) {
    const auto& a = steps[n];
    const auto& b = steps[n + 1];
    const double dt = b.t - a.t;
    if (!(dt > 0.0))
      throw std::invalid_argument("dissipation_residual: nonincreasing time");
    const double bb = beta1(a.z);
    const double rate = dt > 0 ? (b.psi2() - a.psi2()) / dt : 0.0;
    const double visc = 0.5 * lc.nu * a.v_V2;
    const double decay = (-lc.delta0 + lc.c0 * e2 * bb) * a.psi2();
    const double frees = c_free * (1.0 + e2 * bb);
    const double res = rate + visc - decay - frees;
    rep.t.push_back(a.t);
    rep.residual.push_back(res);
    scale = std::max(scale,
                     std::abs(rate) + visc + std::abs(decay) + frees);
    worst = std::max(worst, res);
  }
  rep.scale = scale;
  rep.worst = worst;
  const double cut = tol * std::max(scale, 1e-300);
  size_t bad = 0;
  for (double r : rep.residual)
    if (r > cut) ++bad;
  rep.violating_fraction =
      static_cast<double>(bad) / static_cast<double>(rep.residual.size());
  return rep;
}

double linear_decay_check(const std::vector<SplitSample>& samples,
                          double delta0) {
  if (samples.empty()) return 0.0;
  const double base = samples.front().lin2;
  if (!(base > 0.0)) return 0.0;
  const double t0 = samples.front().t;
  double worst = 0.0;
  for (const auto& s : samples) {
    const double bound = std::exp(-2.0 * delta0 * (s.t - t0)) * base;
    worst = std::max(worst, s.lin2 / bound);
  }
  return worst;
}

CutoffSpec make_cutoff(double radius, double x_c, double y_c) {
  if (!(radius > 0.0))
    throw std::invalid_argument("make_cutoff: radius must be positive");
  CutoffSpec c;
  c.radius = radius;
  c.x_c = x_c;
  c.y_c = y_c;
  c.sup_rho_prime = 1.875;
  return c;
}

double cutoff_value(double s) {
  if (s <= 1.0) return 0.0;
  if (s >= 2.0) return 1.0;
  const double x = s - 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double cutoff_derivative(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double x = s - 1.0;
  return 30.0 * x * x * (1.0 + x * (-2.0 + x));
}

double cutoff_energy_H(const Field& v, const HistoryState& eta,
                       const CutoffSpec& cut) {
  const double k2 = cut.radius * cut.radius;
  const auto w = radial_weight(*v.grid, cut.x_c, cut.y_c,
                               [&](double d2) { return cutoff_value(d2 / k2); });
  return weighted_energy(v, eta, w);
}

double tail_energy(const Field& v, const HistoryState& eta, double R,
                   double x_c, double y_c) {
  if (R < 0.0) throw std::invalid_argument("tail_energy: negative radius");
  const double R2 = R * R;
  const auto w = radial_weight(*v.grid, x_c, y_c,
                               [&](double d2) { return d2 >= R2 ? 1.0 : 0.0; });
  return weighted_energy(v, eta, w);
}

PoincareResult generalized_poincare_check(const Field& u,
                                          const CutoffSpec& cut) {
  const double k2 = cut.radius * cut.radius;
  const auto w = radial_weight(*u.grid, cut.x_c, cut.y_c,
                               [&](double d2) { return cutoff_value(d2 / k2); });
  PoincareResult r;
  r.lhs = 0.25 * u.grid->lambda1 * weighted_square(synthesize(u), w);
  Field gx(u.grid), gy(u.grid);
  gradient_fields(u, gx, gy);
  r.rhs = weighted_square(synthesize(gx), w) +
          weighted_square(synthesize(gy), w);
  r.margin = r.rhs - r.lhs;
  return r;
}

AbsorbingRadii absorbing_radius(const NoisePath& path,
                                const ConstantsLedger& lc, double epsilon,
                                double T_trunc) {
  if (!(path.dt > 0.0))
    throw std::invalid_argument("absorbing_radius: path.dt must be positive");
  if (!(T_trunc > 0.0))
    throw std::invalid_argument("absorbing_radius: T_trunc must be positive");
  if (!(lc.sigma > 0.0))
    throw std::invalid_argument("absorbing_radius: ledger sigma unset");

  const double dt = path.dt;
  const auto nT = static_cast<int64_t>(std::llround(T_trunc / dt));
  if (nT < 1 || std::abs(T_trunc - nT * dt) > 1e-9 * T_trunc)
    throw std::invalid_argument(
        "absorbing_radius: T_trunc is not on the path lattice");
  const auto burn =
      static_cast<int64_t>(std::ceil(10.0 / (lc.sigma * dt)));

  // z along the shifted path: exact relaxation recursion from a zeroed start
  // well before the window, sampled on [-T_trunc, 0].
  std::vector<double> beta(static_cast<size_t>(nT) + 1);
  double z = 0.0;
  for (int64_t n = -nT - burn; n < 0; ++n) {
    if (n >= -nT) beta[static_cast<size_t>(n + nT)] = beta1(z);
    z = ou_advance(z, lc.sigma, dt, path.increment(n));
  }
  beta[static_cast<size_t>(nT)] = beta1(z);

  // inner integral int_s^0 beta1, backward cumulative trapezoid
  std::vector<double> ibeta(beta.size());
  ibeta.back() = 0.0;
  for (size_t i = beta.size() - 1; i-- > 0;)
    ibeta[i] = ibeta[i + 1] + 0.5 * dt * (beta[i] + beta[i + 1]);

  const double e2 = epsilon * epsilon;
  const double e4 = e2 * e2;
  const double c5 = lc.c5();

  AbsorbingRadii out;
  out.epsilon = epsilon;
  out.sigma = lc.sigma;
  out.T_trunc = T_trunc;
  out.dt_quad = dt;

  double i0 = 0.0, i1 = 0.0;
  exp_moments(lc.delta0 * dt, i0, i1);

  // product quadrature: exact e^{delta0 s} against linear slow factors
  auto slow1 = [&](size_t i) {
    return std::exp(lc.c0 * e2 * ibeta[i]) * (1.0 + e2 * beta[i]);
  };
  double r1 = 0.0;
  for (size_t i = 0; i + 1 < beta.size(); ++i) {
    const double s_lo = (static_cast<double>(i) - static_cast<double>(nT)) * dt;
    const double seg = dt * std::exp(lc.delta0 * s_lo) *
                       (slow1(i) * (i0 - i1) + slow1(i + 1) * i1);
    r1 += seg;
  }
  out.r1 = r1;

  auto slow3 = [&](size_t i) {
    const double b = beta[i];
    return std::exp(c5 * e4 * ibeta[i]) *
           (1.0 + e2 * b + e2 * b * (r1 + 1.0));
  };
  double r3 = 0.0;
  for (size_t i = 0; i + 1 < beta.size(); ++i) {
    const double s_lo = (static_cast<double>(i) - static_cast<double>(nT)) * dt;
    r3 += dt * std::exp(lc.delta0 * s_lo) *
          (slow3(i) * (i0 - i1) + slow3(i + 1) * i1);
  }
  out.r3 = r3;

  double rhat = 0.0;
  double beta_mean = 0.0;
  for (size_t i = 0; i < beta.size(); ++i) {
    const double s = (static_cast<double>(i) - static_cast<double>(nT)) * dt;
    rhat = std::max(rhat, beta[i] * std::exp(lc.delta2 * s));
    beta_mean += beta[i];
  }
  beta_mean /= static_cast<double>(beta.size());
  out.r_hat = rhat;
  out.r2 = r1 + e2 * rhat;
  out.r4 = r3 + e2 * rhat;

  // estimated discarded tail of r1: slow factor frozen at the window edge,
  // effective decay rate reduced by the running beta1 cost
  const double eff = lc.delta0 - lc.c0 * e2 * beta_mean;
  out.truncation_error =
      eff > 0.0 ? slow1(0) * std::exp(-lc.delta0 * T_trunc) / eff
                : std::numeric_limits<double>::infinity();
  return out;
}

AbsorbingReport absorbing_set_check(
    const std::vector<double>& horizons,
    const std::vector<std::vector<double>>& member_energy,
    const AbsorbingRadii& radii) {
  AbsorbingReport rep;
  rep.horizons = horizons;
  if (horizons.empty() || member_energy.empty()) return rep;
  for (const auto& row : member_energy)
    if (row.size() != horizons.size())
      throw std::invalid_argument(
          "absorbing_set_check: member row length mismatch");

  rep.max_energy.assign(horizons.size(), 0.0);
  for (size_t j = 0; j < horizons.size(); ++j)
    for (const auto& row : member_energy)
      rep.max_energy[j] = std::max(rep.max_energy[j], row[j]);

  rep.threshold = 2.0 * rep.max_energy.back();
  rep.C = rep.threshold / (radii.r2 + 1.0);

  // first horizon after which the ensemble never exceeds the threshold
  size_t first = horizons.size();
  for (size_t j = horizons.size(); j-- > 0;) {
    if (rep.max_energy[j] <= rep.threshold)
      first = j;
    else
      break;
  }
  if (first < horizons.size()) {
    rep.absorbed = true;
    rep.T_absorb = horizons[first];
  }
  return rep;
}

}  // namespace nsmem
