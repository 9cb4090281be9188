#include "nsmem/solver.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "nsmem/forcing.hpp"
#include "nsmem/ou.hpp"

namespace nsmem {

namespace {

void check_path(const NoisePath& path, double dt) {
  if (std::abs(path.dt - dt) > 1e-12 * dt)
    throw std::invalid_argument("integrate: path step differs from config dt");
}

/// v <- E (v + a g1) + a g2 per mode.
void corrector(Field& v, const std::vector<double>& decay, double a,
               const Field& g1, const Field& g2) {
  const int m = v.grid->size();
  for (int i = 0; i < m; ++i) {
    const double E = decay[i];
    v.u1[i] = E * (v.u1[i] + a * g1.u1[i]) + a * g2.u1[i];
    v.u2[i] = E * (v.u2[i] + a * g1.u2[i]) + a * g2.u2[i];
  }
}

/// out <- E (v + dt g) per mode (the predictor).
void predictor(Field& out, const Field& v, const std::vector<double>& decay,
               double dt, const Field& g) {
  const int m = v.grid->size();
  for (int i = 0; i < m; ++i) {
    const double E = decay[i];
    out.u1[i] = E * (v.u1[i] + dt * g.u1[i]);
    out.u2[i] = E * (v.u2[i] + dt * g.u2[i]);
  }
}

}  // namespace

BlowUpError::BlowUpError(double t_at)
    : std::runtime_error("blow-up guard tripped at t = " + std::to_string(t_at)),
      t(t_at) {}

int64_t step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_count: dt <= 0");
  const double raw = t_end / dt;
  const auto n = static_cast<int64_t>(std::llround(raw));
  if (n < 0 ||
      std::abs(raw - static_cast<double>(n)) > 1e-9 * std::max(1.0, raw))
    throw std::invalid_argument("step_count: t_end is not on the dt lattice");
  return n;
}

Simulator::Simulator(std::shared_ptr<const SpectralGrid> grid,
                     std::shared_ptr<const HistoryGrid> hgrid,
                     const SimConfig& cfg)
    : grid_(std::move(grid)),
      hgrid_(std::move(hgrid)),
      cfg_(cfg),
      f_(make_bump_field(grid_, cfg.physics.forcing)),
      h_(make_bump_field(grid_, cfg.physics.noise_profile)),
      noise_term_(grid_),
      decay_(static_cast<size_t>(grid_->size())),
      conv_(grid_),
      un_(grid_),
      ustar_(grid_),
      uavg_(grid_),
      g1_(grid_),
      g2_(grid_) {
  if (hgrid_->grid.get() != grid_.get())
    throw std::invalid_argument(
        "Simulator: history grid was built on a different spectral grid");
  if (!(cfg_.integration.dt > 0.0))
    throw std::invalid_argument("Simulator: dt must be positive");
  const double nu = cfg_.physics.nu;
  const double dt = cfg_.integration.dt;
  const int m = grid_->size();
  for (int i = 0; i < m; ++i) decay_[i] = std::exp(-nu * grid_->ksq[i] * dt);
  noise_term_ = stokes_apply(h_, 2);
  noise_term_.scale(-nu);
  noise_term_.axpy(cfg_.noise.sigma, h_);
}

SimState Simulator::make_state(int64_t n, Field v, HistoryState eta,
                               double z) const {
  SimState s;
  s.n = n;
  s.t = static_cast<double>(n) * cfg_.integration.dt;
  s.z = z;
  s.v = std::move(v);
  s.eta = std::move(eta);
  return s;
}

void Simulator::explicit_rhs(const Field& u_adv, const Field& v_arg,
                             bool forced, double z, const Field& memconv,
                             Field& out) {
  conv_.bilinear_B(u_adv, v_arg, out);
  out.scale(-1.0);
  out.axpy(-1.0, memconv);
  if (forced) {
    out.axpy(1.0, f_);
    const double eps = cfg_.noise.epsilon;
    if (eps != 0.0) out.axpy(eps * z, noise_term_);
  }
}

Simulator::RhsTerms Simulator::rhs_terms(const SimState& s) {
  RhsTerms r{Field(grid_), Field(grid_), Field(grid_), f_, noise_term_};
  r.stokes = stokes_apply(s.v, 2);
  r.stokes.scale(-cfg_.physics.nu);
  memory_convolution(s.eta, r.memory);
  r.memory.scale(-1.0);
  const Field u = recover_u(s);
  conv_.bilinear_B(u, u, r.transport);
  r.transport.scale(-1.0);
  r.noise.scale(cfg_.noise.epsilon * s.z);
  return r;
}

Field Simulator::rhs_v(const SimState& s) {
  RhsTerms t = rhs_terms(s);
  Field out = std::move(t.stokes);
  out.axpy(1.0, t.memory);
  out.axpy(1.0, t.transport);
  out.axpy(1.0, t.forcing);
  out.axpy(1.0, t.noise);
  return out;
}

Field Simulator::recover_u(const SimState& s) const {
  Field u = s.v;
  const double eps = cfg_.noise.epsilon;
  if (eps != 0.0 && s.z != 0.0) u.axpy(eps * s.z, h_);
  return u;
}

TrajectorySample Simulator::snapshot(const SimState& s) const {
  TrajectorySample r;
  r.t = s.t;
  r.z = s.z;
  const double nh = norm_H(s.v);
  const double nv = norm_V(s.v);
  const double nm = norm_M(s.eta);
  r.v_H2 = nh * nh;
  r.v_V2 = nv * nv;
  r.eta_M2 = nm * nm;
  r.div_max = max_divergence(s.v);
  return r;
}

double Simulator::guard_for(const SimState& s) const {
  const double nh = norm_H(s.v);
  const double nm = norm_M(s.eta);
  return 1e12 * std::max(1.0, nh * nh + nm * nm);
}

void Simulator::step_impl(SimState& s, const NoisePath& path, Field& memconv,
                          bool& memconv_valid, double guard) {
  const double dt = cfg_.integration.dt;
  const double eps = cfg_.noise.epsilon;
  const double dW = path.increment(s.n);
  const double z1 = ou_advance(s.z, cfg_.noise.sigma, dt, dW);

  if (!memconv_valid) memory_convolution(s.eta, memconv);

  un_ = s.v;
  if (eps != 0.0) un_.axpy(eps * s.z, h_);
  explicit_rhs(un_, un_, true, s.z, memconv, g1_);

  predictor(ustar_, s.v, decay_, dt, g1_);
  if (eps != 0.0) ustar_.axpy(eps * z1, h_);

  uavg_ = un_;
  uavg_.axpy(1.0, ustar_);
  uavg_.scale(0.5);
  HistoryState eta1 = advance_history(s.eta, uavg_, dt);

  memory_convolution(eta1, memconv);
  memconv_valid = true;
  explicit_rhs(ustar_, ustar_, true, z1, memconv, g2_);

  corrector(s.v, decay_, 0.5 * dt, g1_, g2_);
  detail::leray_inplace(s.v);

  s.n += 1;
  s.t = static_cast<double>(s.n) * dt;
  s.z = z1;
  s.eta = std::move(eta1);

  const double nh = norm_H(s.v);
  if (!std::isfinite(nh) || nh * nh > guard) throw BlowUpError(s.t);
}

void Simulator::step(SimState& s, const NoisePath& path) {
  check_path(path, cfg_.integration.dt);
  Field memconv(grid_);
  bool valid = false;
  step_impl(s, path, memconv, valid, guard_for(s));
}

Trajectory Simulator::integrate(SimState s0, const NoisePath& path,
                                int64_t n_steps, bool per_step_series) {
  check_path(path, cfg_.integration.dt);
  if (n_steps < 0) throw std::invalid_argument("integrate: negative step count");
  Trajectory out;
  const double guard = guard_for(s0);
  Field memconv(grid_);
  bool memconv_valid = false;
  const int every = std::max(1, cfg_.integration.sample_every);

  const TrajectorySample first = snapshot(s0);
  out.samples.push_back(first);
  if (per_step_series) out.steps.push_back(first);

  SimState s = std::move(s0);
  for (int64_t i = 0; i < n_steps; ++i) {
    step_impl(s, path, memconv, memconv_valid, guard);
    const bool at_sample = ((i + 1) % every == 0) || (i + 1 == n_steps);
    if (at_sample || per_step_series) {
      const TrajectorySample row = snapshot(s);
      if (at_sample) out.samples.push_back(row);
      if (per_step_series) out.steps.push_back(row);
    }
  }
  out.last = std::move(s);
  return out;
}

SplitTrajectory Simulator::integrate_split(SimState s0, const NoisePath& path,
                                           int64_t n_steps) {
  check_path(path, cfg_.integration.dt);
  if (n_steps < 0)
    throw std::invalid_argument("integrate_split: negative step count");
  const double dt = cfg_.integration.dt;
  const double eps = cfg_.noise.epsilon;
  const int every = std::max(1, cfg_.integration.sample_every);
  const double guard = guard_for(s0);

  SimState F = std::move(s0);
  SimState L = make_state(F.n, F.v, F.eta, F.z);
  SimState Np = make_state(F.n, Field(grid_),
                           history_combine(0.0, F.eta, 0.0, F.eta), F.z);

  Field mcF(grid_), mcL(grid_), mcN(grid_);
  Field g1F(grid_), g1L(grid_), g1N(grid_);
  Field g2F(grid_), g2L(grid_), g2N(grid_);
  Field vsF(grid_), vsL(grid_), vsN(grid_);
  Field varg(grid_);
  bool mc_valid = false;

  auto split_snapshot = [&](void) {
    SplitSample r;
    r.t = F.t;
    {
      const double a = norm_H(F.v), b = norm_M(F.eta);
      r.full2 = a * a + b * b;
    }
    {
      const double a = norm_H(L.v), b = norm_M(L.eta);
      r.lin2 = a * a + b * b;
    }
    Field dv = F.v;
    dv.axpy(-1.0, L.v);
    HistoryState de = history_combine(1.0, F.eta, -1.0, L.eta);
    {
      const double a = norm_H(dv), b = norm_M(de);
      r.nonlin2 = a * a + b * b;
    }
    dv.axpy(-1.0, Np.v);
    HistoryState dd = history_combine(1.0, de, -1.0, Np.eta);
    {
      const double a = norm_H(dv), b = norm_M(dd);
      r.direct_err =
          r.full2 > 0.0 ? std::sqrt((a * a + b * b) / r.full2) : 0.0;
    }
    return r;
  };

  SplitTrajectory out;
  out.samples.push_back(split_snapshot());

  for (int64_t i = 0; i < n_steps; ++i) {
    const double dW = path.increment(F.n);
    const double z0 = F.z;
    const double z1 = ou_advance(z0, cfg_.noise.sigma, dt, dW);

    if (!mc_valid) {
      memory_convolution(F.eta, mcF);
      memory_convolution(L.eta, mcL);
      memory_convolution(Np.eta, mcN);
    }

    // stage 1: the full advecting velocity drives all three systems
    un_ = F.v;
    if (eps != 0.0) un_.axpy(eps * z0, h_);
    explicit_rhs(un_, un_, true, z0, mcF, g1F);
    explicit_rhs(un_, L.v, false, z0, mcL, g1L);
    varg = Np.v;
    if (eps != 0.0) varg.axpy(eps * z0, h_);
    explicit_rhs(un_, varg, true, z0, mcN, g1N);

    predictor(vsF, F.v, decay_, dt, g1F);
    predictor(vsL, L.v, decay_, dt, g1L);
    predictor(vsN, Np.v, decay_, dt, g1N);
    ustar_ = vsF;
    if (eps != 0.0) ustar_.axpy(eps * z1, h_);

    // stage-averaged advecting velocities, one per system
    uavg_ = un_;
    uavg_.axpy(1.0, ustar_);
    uavg_.scale(0.5);
    HistoryState eF = advance_history(F.eta, uavg_, dt);
    uavg_ = L.v;
    uavg_.axpy(1.0, vsL);
    uavg_.scale(0.5);
    HistoryState eL = advance_history(L.eta, uavg_, dt);
    uavg_ = varg;
    uavg_.axpy(1.0, vsN);
    if (eps != 0.0) uavg_.axpy(eps * z1, h_);
    uavg_.scale(0.5);
    HistoryState eN = advance_history(Np.eta, uavg_, dt);

    // stage 2
    memory_convolution(eF, mcF);
    memory_convolution(eL, mcL);
    memory_convolution(eN, mcN);
    mc_valid = true;
    explicit_rhs(ustar_, ustar_, true, z1, mcF, g2F);
    explicit_rhs(ustar_, vsL, false, z1, mcL, g2L);
    varg = vsN;
    if (eps != 0.0) varg.axpy(eps * z1, h_);
    explicit_rhs(ustar_, varg, true, z1, mcN, g2N);

    corrector(F.v, decay_, 0.5 * dt, g1F, g2F);
    corrector(L.v, decay_, 0.5 * dt, g1L, g2L);
    corrector(Np.v, decay_, 0.5 * dt, g1N, g2N);
    detail::leray_inplace(F.v);
    detail::leray_inplace(L.v);
    detail::leray_inplace(Np.v);

    F.eta = std::move(eF);
    L.eta = std::move(eL);
    Np.eta = std::move(eN);
    F.n += 1;
    L.n = F.n;
    Np.n = F.n;
    F.t = static_cast<double>(F.n) * dt;
    L.t = F.t;
    Np.t = F.t;
    F.z = z1;
    L.z = z1;
    Np.z = z1;

    const double nh = norm_H(F.v);
    if (!std::isfinite(nh) || nh * nh > guard) throw BlowUpError(F.t);

    if (((i + 1) % every == 0) || (i + 1 == n_steps))
      out.samples.push_back(split_snapshot());
  }

  out.last = std::move(F);
  out.last_lin = std::move(L);
  out.last_nonlin = std::move(Np);
  return out;
}

Simulator make_simulator(const SimConfig& cfg) {
  auto grid = make_grid(cfg.grid.L, cfg.grid.N);
  const KernelSpec kernel = make_kernel(cfg.kernel.delta);
  auto hgrid =
      make_history_grid(grid, kernel, cfg.integration.dt, cfg.kernel.nodes,
                        cfg.kernel.s_max, cfg.kernel.gamma);
  return Simulator(std::move(grid), hgrid, cfg);
}

}  // namespace nsmem
