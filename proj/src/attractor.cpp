#include "nsmem/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nsmem/ou.hpp"

namespace nsmem {

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Stationary relaxation value at lattice time t for the given path,
/// truncated far enough back that the cut is below 1e-9.
double stationary_z(const NoisePath& path, double sigma, double t) {
  const auto nz =
      static_cast<int64_t>(std::ceil(24.0 / (sigma * path.dt)));
  return ou_pullback(path, sigma, t, static_cast<double>(nz) * path.dt).z;
}

/// Materialized quadrature-node values of one history state.
std::vector<Field> node_values(const HistoryState& h) {
  const auto& nodes = h.hgrid->s_nodes;
  std::vector<Field> out;
  out.reserve(nodes.size());
  for (double s : nodes) out.push_back(history_at(h, s));
  return out;
}

double max_member_norm(const PointCloud& c) {
  double m = 0.0;
  for (const auto& s : c.members) {
    const double a = norm_H(s.v);
    const double b = norm_M(s.eta);
    m = std::max(m, std::sqrt(a * a + b * b));
  }
  return m;
}

}  // namespace

double dist_M(const HistoryState& a, const HistoryState& b) {
  if (a.hgrid.get() != b.hgrid.get())
    throw std::invalid_argument("dist_M: history quadratures differ");
  const auto& hg = *a.hgrid;
  double acc = 0.0;
  for (size_t j = 0; j < hg.s_nodes.size(); ++j) {
    Field d = history_at(a, hg.s_nodes[j]);
    d.axpy(-1.0, history_at(b, hg.s_nodes[j]));
    const double nv = norm_V(d);
    acc += hg.quad_weights[j] * nv * nv;
  }
  return std::sqrt(acc);
}

double state_distance(const SimState& a, const SimState& b) {
  Field d = a.v;
  d.axpy(-1.0, b.v);
  const double dv = norm_H(d);
  const double dm = dist_M(a.eta, b.eta);
  return std::sqrt(dv * dv + dm * dm);
}

PointCloud make_ball_cloud(const Simulator& sim, int members, double radius,
                           uint64_t seed) {
  if (members < 1)
    throw std::invalid_argument("make_ball_cloud: members must be >= 1");
  if (!(radius >= 0.0))
    throw std::invalid_argument("make_ball_cloud: negative radius");
  const auto& grid = sim.grid();
  const auto& hgrid = sim.hgrid();
  const double delta = hgrid->kernel.delta;

  PointCloud cloud;
  cloud.epsilon = sim.config().noise.epsilon;
  cloud.members.reserve(static_cast<size_t>(members));
  for (int m = 0; m < members; ++m) {
    const auto [u1, u2] = counter_uniform_pair(seed, kStreamEnsemble, m);
    const double r = radius * std::sqrt(u1);
    const double wv = u2;
    Field v = random_field(grid, mix_seed(seed, 2 * m), 3.0);
    v.scale(r * std::sqrt(wv));

    const Field shape = random_field(grid, mix_seed(seed, 2 * m + 1), 3.0);
    HistoryState eta = init_history(
        hgrid, [delta](double s) { return std::exp(-delta * s); }, shape);
    const double nm = norm_M(eta);
    const double target = r * std::sqrt(1.0 - wv);
    eta = history_combine(nm > 0.0 ? target / nm : 0.0, eta, 0.0, eta);

    cloud.members.push_back(sim.make_state(0, std::move(v), std::move(eta), 0.0));
  }
  return cloud;
}

PointCloud pullback_ensemble(Simulator& sim, const PointCloud& initial,
                             uint64_t omega_seed, double T) {
  if (initial.members.empty())
    throw std::invalid_argument("pullback_ensemble: empty initial cloud");
  if (T < 0.0)
    throw std::invalid_argument("pullback_ensemble: negative horizon");
  const double dt = sim.config().integration.dt;
  const double sigma = sim.config().noise.sigma;
  const int64_t n_steps = step_count(T, dt);
  const NoisePath path{omega_seed, dt};
  const double z0 = stationary_z(path, sigma, -T);

  PointCloud out;
  out.epsilon = sim.config().noise.epsilon;
  out.omega_seed = omega_seed;
  out.t_pullback = T;
  for (size_t m = 0; m < initial.members.size(); ++m) {
    SimState s0 = sim.make_state(-n_steps, initial.members[m].v,
                                 initial.members[m].eta, z0);
    try {
      Trajectory tr = sim.integrate(std::move(s0), path, n_steps);
      out.members.push_back(std::move(tr.last));
    } catch (const BlowUpError&) {
      out.dropped.push_back(static_cast<int>(m));
    }
  }
  if (out.members.empty())
    throw std::runtime_error("pullback_ensemble: every member blew up");
  return out;
}

double hausdorff_semidist(const PointCloud& A, const PointCloud& B) {
  if (A.members.empty() || B.members.empty())
    throw std::invalid_argument("hausdorff_semidist: empty cloud");

  // materialize quadrature-node values once per member
  std::vector<std::vector<Field>> na, nb;
  na.reserve(A.members.size());
  for (const auto& s : A.members) na.push_back(node_values(s.eta));
  nb.reserve(B.members.size());
  for (const auto& s : B.members) nb.push_back(node_values(s.eta));

  const auto& hg = *A.members.front().eta.hgrid;
  if (B.members.front().eta.hgrid.get() != &hg)
    throw std::invalid_argument("hausdorff_semidist: history quadratures differ");
  const auto& w = hg.quad_weights;
  const size_t nj = hg.s_nodes.size();

  Field d(A.members.front().v.grid);
  double worst = 0.0;
  for (size_t ia = 0; ia < A.members.size(); ++ia) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t ib = 0; ib < B.members.size(); ++ib) {
      d = A.members[ia].v;
      d.axpy(-1.0, B.members[ib].v);
      const double dv = norm_H(d);
      double acc = dv * dv;
      if (acc >= best) continue;
      for (size_t j = 0; j < nj && acc < best; ++j) {
        d = na[ia][j];
        d.axpy(-1.0, nb[ib][j]);
        const double nv = norm_V(d);
        acc += w[j] * nv * nv;
      }
      best = std::min(best, acc);
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

PointCloud attractor_estimate(Simulator& sim, uint64_t omega_seed,
                              const std::vector<double>& horizons,
                              double radius, uint64_t cloud_seed, double tol,
                              EstimateCurve* curve) {
  if (horizons.empty())
    throw std::invalid_argument("attractor_estimate: no horizons");
  for (size_t i = 1; i < horizons.size(); ++i)
    if (!(horizons[i] > horizons[i - 1]))
      throw std::invalid_argument("attractor_estimate: horizons not ascending");

  const PointCloud ball = make_ball_cloud(
      sim, sim.config().experiment.members, radius, cloud_seed);
  PointCloud prev = pullback_ensemble(sim, ball, omega_seed, horizons[0]);
  if (curve) {
    curve->horizons.clear();
    curve->dist.clear();
    curve->converged = false;
  }
  for (size_t k = 1; k < horizons.size(); ++k) {
    PointCloud cur = pullback_ensemble(sim, ball, omega_seed, horizons[k]);
    const double d = std::max(hausdorff_semidist(cur, prev),
                              hausdorff_semidist(prev, cur));
    const double scale =
        std::max({radius, max_member_norm(cur), 1e-12});
    if (curve) {
      curve->horizons.push_back(horizons[k]);
      curve->dist.push_back(d);
      curve->converged = d <= tol * scale;
    }
    prev = std::move(cur);
    if (curve && curve->converged) break;
  }
  return prev;
}

SweepReport semicontinuity_sweep(const SimConfig& cfg) {
  SweepReport rep;
  rep.eps_list = cfg.experiment.eps_list;
  rep.seeds.assign(cfg.experiment.seeds.begin(), cfg.experiment.seeds.end());
  rep.members = cfg.experiment.members;
  rep.pullback_T = cfg.experiment.pullback_T;
  if (rep.eps_list.empty() || rep.seeds.empty())
    throw std::invalid_argument("semicontinuity_sweep: empty eps or seed list");
  for (size_t i = 1; i < rep.eps_list.size(); ++i)
    if (!(rep.eps_list[i] < rep.eps_list[i - 1]))
      throw std::invalid_argument(
          "semicontinuity_sweep: eps list must descend");

  const double T = cfg.experiment.pullback_T;
  const double tol = cfg.experiment.tol;
  const double radius = cfg.experiment.radius;
  const std::vector<double> ladder{0.5 * T, T};
  const std::vector<double> single{T};
  const uint64_t cloud_seed = mix_seed(cfg.noise.seed, 0xba11);

  auto grid = make_grid(cfg.grid.L, cfg.grid.N);
  const KernelSpec kernel = make_kernel(cfg.kernel.delta);
  auto hgrid =
      make_history_grid(grid, kernel, cfg.integration.dt, cfg.kernel.nodes,
                        cfg.kernel.s_max, cfg.kernel.gamma);

  SimConfig base = cfg;
  base.noise.epsilon = 0.0;
  Simulator sim0(grid, hgrid, base);
  EstimateCurve curve0;
  const PointCloud A0 = attractor_estimate(sim0, rep.seeds.front(), ladder,
                                           radius, cloud_seed, tol, &curve0);
  rep.base_converged = curve0.converged;

  rep.dist.resize(rep.eps_list.size());
  for (size_t ie = 0; ie < rep.eps_list.size(); ++ie) {
    SimConfig ce = cfg;
    ce.noise.epsilon = rep.eps_list[ie];
    Simulator sime(grid, hgrid, ce);
    for (size_t is = 0; is < rep.seeds.size(); ++is) {
      EstimateCurve cv;
      const PointCloud Ae = attractor_estimate(
          sime, rep.seeds[is], is == 0 ? ladder : single, radius, cloud_seed,
          tol, &cv);
      rep.dist[ie].push_back(hausdorff_semidist(Ae, A0));
      rep.dropped_total += static_cast<int>(Ae.dropped.size());
    }
  }

  rep.mean_dist.resize(rep.eps_list.size());
  rep.max_dist.resize(rep.eps_list.size());
  for (size_t ie = 0; ie < rep.eps_list.size(); ++ie) {
    double s = 0.0, mx = 0.0;
    for (double d : rep.dist[ie]) {
      s += d;
      mx = std::max(mx, d);
    }
    rep.mean_dist[ie] = s / static_cast<double>(rep.dist[ie].size());
    rep.max_dist[ie] = mx;
  }
  rep.nonincreasing_within_noise = true;
  for (size_t ie = 1; ie < rep.mean_dist.size(); ++ie)
    if (rep.mean_dist[ie] > 1.10 * rep.mean_dist[ie - 1])
      rep.nonincreasing_within_noise = false;
  rep.smallest_below_largest = rep.mean_dist.back() < rep.mean_dist.front();
  return rep;
}

ConvergenceReport convergence_bound_check(const SimConfig& cfg,
                                          uint64_t omega_seed,
                                          const std::vector<double>& eps_list,
                                          double T, double separation0) {
  ConvergenceReport rep;
  rep.eps_list = eps_list;
  if (eps_list.empty())
    throw std::invalid_argument("convergence_bound_check: empty eps list");
  for (double e : eps_list)
    if (!(e > 0.0))
      throw std::invalid_argument(
          "convergence_bound_check: eps values must be positive");

  auto grid = make_grid(cfg.grid.L, cfg.grid.N);
  const KernelSpec kernel = make_kernel(cfg.kernel.delta);
  auto hgrid =
      make_history_grid(grid, kernel, cfg.integration.dt, cfg.kernel.nodes,
                        cfg.kernel.s_max, cfg.kernel.gamma);
  const double dt = cfg.integration.dt;
  const int64_t n_steps = step_count(T, dt);
  const NoisePath path{omega_seed, dt};
  const double z0 = stationary_z(path, cfg.noise.sigma, 0.0);
  const double delta = kernel.delta;

  Field v0 = random_field(grid, mix_seed(omega_seed, 11), 3.0);
  v0.scale(0.5);
  const Field shape = random_field(grid, mix_seed(omega_seed, 12), 3.0);
  HistoryState eta0 = init_history(
      hgrid, [delta](double s) { return 0.3 * std::exp(-delta * s); }, shape);
  Field w = random_field(grid, mix_seed(omega_seed, 13), 3.0);

  SimConfig cbase = cfg;
  cbase.noise.epsilon = 0.0;
  Simulator sim0(grid, hgrid, cbase);
  const Trajectory base =
      sim0.integrate(sim0.make_state(0, v0, eta0, z0), path, n_steps);

  for (double e : eps_list) {
    SimConfig ce = cfg;
    ce.noise.epsilon = e;
    Simulator sime(grid, hgrid, ce);
    const Trajectory run =
        sime.integrate(sime.make_state(0, v0, eta0, z0), path, n_steps);
    const double d = state_distance(run.last, base.last);
    rep.diff2.push_back(d * d);

    Field vp = v0;
    vp.axpy(separation0, w);
    const Trajectory pert =
        sime.integrate(sime.make_state(0, std::move(vp), eta0, z0), path,
                       n_steps);
    const double dT = state_distance(pert.last, run.last);
    rep.gronwall_c.push_back(std::log((dT * dT) / (separation0 * separation0)) /
                             T);
  }

  // least-squares slope of log diff2 against log eps
  const size_t n = eps_list.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(eps_list[i]);
    const double y = std::log(std::max(rep.diff2[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  rep.slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  rep.slope_ok = std::abs(rep.slope - 2.0) <= 0.3;

  double cmin = rep.gronwall_c.front(), cmax = rep.gronwall_c.front();
  double cmean = 0.0;
  for (double c : rep.gronwall_c) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    cmean += c;
  }
  cmean /= dn;
  rep.gronwall_spread =
      (cmax - cmin) / std::max(std::abs(cmean), 1e-12);
  return rep;
}

}  // namespace nsmem
