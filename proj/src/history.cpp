#include "nsmem/history.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsmem {

namespace {

// Moments int_a^b (s-a)^p mu(s) ds for p = 0..3, computed about the left edge
// for conditioning.  The exponential family uses the stable closed-form
// recursion; other kernels fall back to composite Simpson.
std::array<double, 4> cell_moments(const KernelSpec& k, double a, double b) {
  std::array<double, 4> m{};
  const double h = b - a;
  if (k.exponential) {
    const double d = k.delta;
    const double scale = d * d * std::exp(-d * a);
    const double eh = std::exp(-d * h);
    double K = (1.0 - eh) / d;  // int_0^h e^{-d t} dt
    m[0] = scale * K;
    double hp = 1.0;
    for (int p = 1; p < 4; ++p) {
      hp *= h;
      K = (p * K - hp * eh) / d;
      m[p] = scale * K;
    }
    return m;
  }
  const int panels = 128;
  const double w = h / panels;
  for (int p = 0; p < 4; ++p) {
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double x0 = a + i * w, x1 = x0 + 0.5 * w, x2 = x0 + w;
      auto f = [&](double x) { return std::pow(x - a, p) * k.mu(x); };
      s += (w / 6.0) * (f(x0) + 4.0 * f(x1) + f(x2));
    }
    m[p] = s;
  }
  return m;
}

}  // namespace

std::shared_ptr<const HistoryGrid> make_history_grid(
    std::shared_ptr<const SpectralGrid> grid, const KernelSpec& kernel,
    double s_min, int nodes, double s_max, double gamma) {
  if (!(s_min > 0.0)) throw std::invalid_argument("make_history_grid: s_min <= 0");
  if (nodes < 4 || nodes % 2 != 0)
    throw std::invalid_argument("make_history_grid: nodes must be even, >= 4");
  auto hg = std::make_shared<HistoryGrid>();
  hg->grid = std::move(grid);
  hg->kernel = kernel;
  hg->s_min = s_min;
  hg->s_max = (s_max > 0.0) ? s_max : 20.0 / kernel.delta;
  hg->gamma = gamma;

  const int nc = nodes / 2;
  double c1 = std::max(8.0 * s_min, hg->s_max * 1e-4);
  c1 = std::min(c1, hg->s_max / 4.0);
  const double r = std::pow(hg->s_max / c1, 1.0 / (nc - 1));
  std::vector<double> edges(nc + 1);
  edges[0] = 0.0;
  for (int i = 1; i <= nc; ++i) edges[i] = c1 * std::pow(r, i - 1);
  edges[nc] = hg->s_max;

  for (int i = 0; i < nc; ++i) {
    const double a = edges[i], b = edges[i + 1];
    const auto m = cell_moments(kernel, a, b);
    // monic orthogonal quadratic t^2 + c1t t + c0t under the cell measure
    const double det = m[0] * m[2] - m[1] * m[1];
    double t1, t2, w1, w2;
    if (det > 0.0 && m[0] > 0.0) {
      const double c0t = (m[1] * m[3] - m[2] * m[2]) / det;
      const double c1t = (m[1] * m[2] - m[0] * m[3]) / det;
      const double disc = std::sqrt(std::max(c1t * c1t - 4.0 * c0t, 0.0));
      t1 = 0.5 * (-c1t - disc);
      t2 = 0.5 * (-c1t + disc);
      w1 = (m[1] - m[0] * t2) / (t1 - t2);
      w2 = m[0] - w1;
    } else {  // vanishing cell mass: fall back to midpoint placement
      t1 = 0.25 * (b - a);
      t2 = 0.75 * (b - a);
      w1 = w2 = 0.5 * m[0];
    }
    hg->s_nodes.push_back(a + t1);
    hg->s_nodes.push_back(a + t2);
    hg->quad_weights.push_back(w1);
    hg->quad_weights.push_back(w2);
  }
  // analytic tail closure beyond s_max
  double tail;
  if (kernel.exponential) {
    tail = kernel.delta * std::exp(-kernel.delta * hg->s_max);
  } else {
    tail = 0.0;  // non-exponential kernels must choose s_max to exhaust mu
  }
  hg->quad_weights.back() += tail;
  return hg;
}

HistoryState empty_history(std::shared_ptr<const HistoryGrid> hgrid) {
  HistoryState h;
  h.hgrid = std::move(hgrid);
  return h;
}

namespace {

double allowed_gap(const HistoryGrid& hg, double age) {
  return hg.gamma * std::max(age, 40.0 * hg.s_min);
}

void prune(HistoryState& h) {
  auto& led = h.ledger;
  const auto& hg = *h.hgrid;
  size_t i = 1;
  while (i + 1 < led.size()) {
    if (led[i + 1].age - led[i - 1].age <= allowed_gap(hg, led[i - 1].age)) {
      auto merged = std::make_shared<Field>(*led[i + 1].inc);
      merged->axpy(1.0, *led[i].inc);
      led[i + 1].inc = std::move(merged);
      led.erase(led.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  // drop intervals that no quadrature node can reach (one boundary is kept
  // beyond s_max so interpolation stencils stay complete)
  const double keep = hg.s_max + allowed_gap(hg, hg.s_max);
  while (led.size() >= 2 && led[led.size() - 2].age >= keep) led.pop_back();
}

// Interpolation plan for eta at one age: coefficients on prefix values.
// Index -1 denotes the built-in anchor eta(0) = 0.
struct QueryPlan {
  int idx[4];
  double c[4];
  int n = 0;
};

QueryPlan plan_query(const std::vector<LedgerEntry>& led, double s) {
  QueryPlan q;
  const int M = static_cast<int>(led.size());
  if (M == 0 || s <= 0.0) return q;
  if (s >= led[M - 1].age) {
    q.idx[0] = M - 1;
    q.c[0] = 1.0;
    q.n = 1;
    return q;
  }
  if (s <= led[0].age) {  // sub-step ramp eta(s) = (s / b0) * I_0
    q.idx[0] = 0;
    q.c[0] = s / led[0].age;
    q.n = 1;
    return q;
  }
  int j = 1;
  while (led[j].age < s) ++j;  // callers sweep ascending; M is small
  // stencil of four abscissae around s, using the exact anchor at age 0
  double xs[4];
  int ix[4];
  if (j == 1 || M < 4) {
    ix[0] = -1; xs[0] = 0.0;
    ix[1] = j - 1; xs[1] = led[j - 1].age;
    ix[2] = j; xs[2] = led[j].age;
    const int j3 = std::min(j + 1, M - 1);
    if (j3 != j) {
      ix[3] = j3; xs[3] = led[j3].age;
      q.n = 4;
    } else {
      q.n = 3;
    }
  } else {
    const int lo = std::min(j - 2, M - 4);
    for (int a = 0; a < 4; ++a) {
      ix[a] = lo + a;
      xs[a] = led[lo + a].age;
    }
    q.n = 4;
  }
  for (int a = 0; a < q.n; ++a) {
    double lag = 1.0;
    for (int b = 0; b < q.n; ++b)
      if (b != a) lag *= (s - xs[b]) / (xs[a] - xs[b]);
    q.idx[a] = ix[a];
    q.c[a] = lag;
  }
  return q;
}

}  // namespace

HistoryState init_history(std::shared_ptr<const HistoryGrid> hgrid,
                          const std::function<double(double)>& rho,
                          const Field& shape) {
  HistoryState h;
  h.hgrid = hgrid;
  const auto& hg = *hgrid;
  double prev = 0.0;
  double age = hg.s_min;
  const double stop = hg.s_max + allowed_gap(hg, hg.s_max);
  while (prev < stop) {
    // composite trapezoid for int_prev^age rho
    const int panels = 32;
    const double w = (age - prev) / panels;
    double integral = 0.5 * (rho(prev) + rho(age));
    for (int i = 1; i < panels; ++i) integral += rho(prev + i * w);
    integral *= w;
    auto inc = std::make_shared<Field>(shape);
    inc->scale(integral);
    h.ledger.push_back({age, std::move(inc)});
    prev = age;
    age += 0.6 * allowed_gap(hg, age);
  }
  return h;
}

HistoryState advance_history(const HistoryState& h, const Field& u, double dt) {
  HistoryState out;
  out.hgrid = h.hgrid;
  out.ledger.reserve(h.ledger.size() + 1);
  auto inc0 = std::make_shared<Field>(u);
  inc0->scale(dt);
  out.ledger.push_back({dt, std::move(inc0)});
  for (const auto& e : h.ledger) out.ledger.push_back({e.age + dt, e.inc});
  prune(out);
  return out;
}

namespace {

// Materializes all prefix fields P_i = sum_{l<=i} I_l.
std::vector<Field> prefixes(const HistoryState& h) {
  std::vector<Field> p;
  p.reserve(h.ledger.size());
  for (size_t i = 0; i < h.ledger.size(); ++i) {
    if (i == 0) {
      p.push_back(*h.ledger[0].inc);
    } else {
      p.push_back(p.back());
      p.back().axpy(1.0, *h.ledger[i].inc);
    }
  }
  return p;
}

}  // namespace

Field history_at(const HistoryState& h, double s) {
  Field eta(h.hgrid->grid);
  if (h.ledger.empty()) return eta;
  const auto pre = prefixes(h);
  const auto q = plan_query(h.ledger, s);
  for (int a = 0; a < q.n; ++a)
    if (q.idx[a] >= 0) eta.axpy(q.c[a], pre[q.idx[a]]);
  return eta;
}

void memory_convolution(const HistoryState& h, Field& out) {
  out.set_zero();
  const auto& hg = *h.hgrid;
  const int M = static_cast<int>(h.ledger.size());
  if (M == 0) return;
  // collapse quadrature and interpolation into one coefficient per interval
  std::vector<double> pc(M, 0.0);
  for (size_t j = 0; j < hg.s_nodes.size(); ++j) {
    const auto q = plan_query(h.ledger, hg.s_nodes[j]);
    for (int a = 0; a < q.n; ++a)
      if (q.idx[a] >= 0) pc[q.idx[a]] += hg.quad_weights[j] * q.c[a];
  }
  double suffix = 0.0;
  std::vector<double> gamma(M);
  for (int i = M - 1; i >= 0; --i) {
    suffix += pc[i];
    gamma[i] = suffix;
  }
  for (int i = 0; i < M; ++i)
    if (gamma[i] != 0.0) out.axpy(gamma[i], *h.ledger[i].inc);
  // apply the Stokes operator
  const auto& g = *out.grid;
  for (int m = 0; m < g.size(); ++m) {
    out.u1[m] *= g.ksq[m];
    out.u2[m] *= g.ksq[m];
  }
}

Field memory_convolution(const HistoryState& h) {
  Field out(h.hgrid->grid);
  memory_convolution(h, out);
  return out;
}

namespace {

double weighted_node_sum(const HistoryState& h, int pow_ksq) {
  const auto& hg = *h.hgrid;
  if (h.ledger.empty()) return 0.0;
  const auto pre = prefixes(h);
  const auto& g = *hg.grid;
  Field eta(hg.grid);
  double total = 0.0;
  for (size_t j = 0; j < hg.s_nodes.size(); ++j) {
    const auto q = plan_query(h.ledger, hg.s_nodes[j]);
    eta.set_zero();
    for (int a = 0; a < q.n; ++a)
      if (q.idx[a] >= 0) eta.axpy(q.c[a], pre[q.idx[a]]);
    double s = 0.0;
    for (int m = 0; m < g.size(); ++m) {
      double w = 1.0;
      for (int p = 0; p < pow_ksq; ++p) w *= g.ksq[m];
      s += w * (std::norm(eta.u1[m]) + std::norm(eta.u2[m]));
    }
    total += hg.quad_weights[j] * g.L * g.L * s;
  }
  return total;
}

}  // namespace

double norm_M(const HistoryState& h) {
  return std::sqrt(weighted_node_sum(h, 1));
}

double norm_M1(const HistoryState& h) {
  return std::sqrt(weighted_node_sum(h, 2));
}

double inner_M(const HistoryState& a, const HistoryState& b) {
  const auto& hg = *a.hgrid;
  if (a.ledger.empty() || b.ledger.empty()) return 0.0;
  const auto pa = prefixes(a);
  const auto pb = prefixes(b);
  const auto& g = *hg.grid;
  Field ea(hg.grid), eb(hg.grid);
  double total = 0.0;
  for (size_t j = 0; j < hg.s_nodes.size(); ++j) {
    const auto qa = plan_query(a.ledger, hg.s_nodes[j]);
    const auto qb = plan_query(b.ledger, hg.s_nodes[j]);
    ea.set_zero();
    eb.set_zero();
    for (int t = 0; t < qa.n; ++t)
      if (qa.idx[t] >= 0) ea.axpy(qa.c[t], pa[qa.idx[t]]);
    for (int t = 0; t < qb.n; ++t)
      if (qb.idx[t] >= 0) eb.axpy(qb.c[t], pb[qb.idx[t]]);
    double s = 0.0;
    for (int m = 0; m < g.size(); ++m)
      s += g.ksq[m] * (ea.u1[m] * std::conj(eb.u1[m]) +
                       ea.u2[m] * std::conj(eb.u2[m]))
               .real();
    total += hg.quad_weights[j] * g.L * g.L * s;
  }
  return total;
}

HistoryState history_combine(double ca, const HistoryState& a, double cb,
                             const HistoryState& b) {
  if (a.ledger.size() != b.ledger.size())
    throw std::invalid_argument("history_combine: ledger shapes differ");
  HistoryState out;
  out.hgrid = a.hgrid;
  out.ledger.reserve(a.ledger.size());
  for (size_t i = 0; i < a.ledger.size(); ++i) {
    if (a.ledger[i].age != b.ledger[i].age)
      throw std::invalid_argument("history_combine: ledger ages differ");
    auto inc = std::make_shared<Field>(*a.ledger[i].inc);
    inc->scale(ca);
    inc->axpy(cb, *b.ledger[i].inc);
    out.ledger.push_back({a.ledger[i].age, std::move(inc)});
  }
  return out;
}

Field brute_force_history_at(const std::vector<Field>& u_record, double dt,
                             double s) {
  if (u_record.empty()) throw std::invalid_argument("empty record");
  Field eta(u_record.front().grid);
  const int n = static_cast<int>(u_record.size());
  const int full = std::min(static_cast<int>(std::floor(s / dt + 1e-9)), n);
  for (int m = n - full; m < n; ++m) eta.axpy(dt, u_record[m]);
  const double frac = s - full * dt;
  if (frac > 0.0 && n - full - 1 >= 0)
    eta.axpy(frac, u_record[n - full - 1]);
  return eta;
}

MemoryOracle::MemoryOracle(const KernelSpec& kernel,
                           std::shared_ptr<const SpectralGrid> grid)
    : delta(kernel.delta), kappa(kernel.kappa), m(std::move(grid)) {
  if (!kernel.exponential)
    throw std::invalid_argument("MemoryOracle: exponential kernels only");
}

void MemoryOracle::advance(const Field& u_a, const Field& u_b, double dt) {
  const double E = std::exp(-delta * dt);
  const double p1 = (1.0 - E) / delta;
  const double p2 = (dt - p1) / (delta * dt);
  m.scale(E);
  m.axpy(kappa * (p1 - p2), u_a);
  m.axpy(kappa * p2, u_b);
}

Field MemoryOracle::convolution() const { return stokes_apply(m, 2); }

}  // namespace nsmem
