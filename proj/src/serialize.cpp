#include "nsmem/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nsmem/diagnostics.hpp"

namespace nsmem {

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& os, const std::vector<std::string>& names) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) os << ',';
    os << names[i];
  }
  os << '\n';
}

void write_csv_row(std::ostream& os, const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << format_double(values[i]);
  }
  os << '\n';
}

std::string trajectory_csv(const std::vector<TrajectorySample>& rows,
                           const ConstantsLedger& lc, double epsilon,
                           double c_free) {
  const ResidualReport rr =
      rows.size() >= 2 ? dissipation_residual(rows, lc, epsilon, c_free)
                       : ResidualReport{};
  std::ostringstream os;
  write_csv_header(os, {"t", "v_H", "v_V", "eta_M", "psi_H", "z", "beta1",
                        "diss_residual", "res_scale"});
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& s = rows[i];
    const double beta1 = s.z * s.z + s.z * s.z * s.z * s.z;
    const double res = i < rr.residual.size() ? rr.residual[i] : 0.0;
    write_csv_row(os, {s.t, std::sqrt(s.v_H2), std::sqrt(s.v_V2),
                       std::sqrt(s.eta_M2), std::sqrt(s.psi2()), s.z, beta1,
                       res, rr.scale});
  }
  return os.str();
}

std::string split_csv(const std::vector<SplitSample>& rows) {
  std::ostringstream os;
  write_csv_header(os,
                   {"t", "psi2_full", "psi2_lin", "psi2_nonlin", "direct_err"});
  for (const auto& s : rows)
    write_csv_row(os, {s.t, s.full2, s.lin2, s.nonlin2, s.direct_err});
  return os.str();
}

namespace {

constexpr char kMagic[9] = "NSMEMCP1";

void put_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void put_u64(std::ostream& os, uint64_t v) { put_bytes(os, &v, 8); }
void put_i64(std::ostream& os, int64_t v) { put_bytes(os, &v, 8); }
void put_f64(std::ostream& os, double v) { put_bytes(os, &v, 8); }

void get_bytes(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
}

uint64_t get_u64(std::istream& is) {
  uint64_t v = 0;
  get_bytes(is, &v, 8);
  return v;
}
int64_t get_i64(std::istream& is) {
  int64_t v = 0;
  get_bytes(is, &v, 8);
  return v;
}
double get_f64(std::istream& is) {
  double v = 0;
  get_bytes(is, &v, 8);
  return v;
}

void put_field(std::ostream& os, const Field& f) {
  const auto n = static_cast<uint64_t>(f.u1.size());
  put_u64(os, n);
  put_bytes(os, f.u1.data(), n * sizeof(cplx));
  put_bytes(os, f.u2.data(), n * sizeof(cplx));
}

Field get_field(std::istream& is,
                const std::shared_ptr<const SpectralGrid>& grid) {
  const uint64_t n = get_u64(is);
  if (n != static_cast<uint64_t>(grid->size()))
    throw std::runtime_error("checkpoint: field size does not match the grid");
  Field f(grid);
  get_bytes(is, f.u1.data(), n * sizeof(cplx));
  get_bytes(is, f.u2.data(), n * sizeof(cplx));
  return f;
}

}  // namespace

void save_checkpoint(std::ostream& os, const SimConfig& cfg,
                     const SimState& s) {
  put_bytes(os, kMagic, 8);
  const std::string cj = dump_config(cfg);
  put_u64(os, cj.size());
  put_bytes(os, cj.data(), cj.size());
  put_i64(os, s.n);
  put_f64(os, s.t);
  put_f64(os, s.z);
  put_field(os, s.v);
  put_u64(os, s.eta.ledger.size());
  for (const auto& e : s.eta.ledger) {
    put_f64(os, e.age);
    put_field(os, *e.inc);
  }
}

void save_checkpoint(const std::string& path, const SimConfig& cfg,
                     const SimState& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path);
  save_checkpoint(os, cfg, s);
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

namespace {

std::string read_header(std::istream& is) {
  char magic[8];
  get_bytes(is, magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  const uint64_t n = get_u64(is);
  if (n > (1u << 20)) throw std::runtime_error("checkpoint: oversized config");
  std::string cj(n, '\0');
  get_bytes(is, cj.data(), n);
  return cj;
}

}  // namespace

SimConfig checkpoint_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  return parse_config(read_header(is));
}

SimState load_checkpoint(std::istream& is, const Simulator& sim) {
  read_header(is);  // config snapshot; geometry is validated below
  const int64_t n = get_i64(is);
  const double t = get_f64(is);
  const double z = get_f64(is);
  Field v = get_field(is, sim.grid());
  const uint64_t m = get_u64(is);
  HistoryState eta;
  eta.hgrid = sim.hgrid();
  eta.ledger.reserve(m);
  double prev_age = 0.0;
  for (uint64_t i = 0; i < m; ++i) {
    LedgerEntry e;
    e.age = get_f64(is);
    if (e.age <= prev_age)
      throw std::runtime_error("checkpoint: ledger ages not increasing");
    prev_age = e.age;
    e.inc = std::make_shared<Field>(get_field(is, sim.grid()));
    eta.ledger.push_back(std::move(e));
  }
  SimState s = sim.make_state(n, std::move(v), std::move(eta), z);
  s.t = t;
  return s;
}

SimState load_checkpoint(const std::string& path, const Simulator& sim) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  return load_checkpoint(is, sim);
}

bool states_identical(const SimState& a, const SimState& b) {
  auto same_field = [](const Field& x, const Field& y) {
    return x.u1.size() == y.u1.size() &&
           std::memcmp(x.u1.data(), y.u1.data(),
                       x.u1.size() * sizeof(cplx)) == 0 &&
           std::memcmp(x.u2.data(), y.u2.data(),
                       x.u2.size() * sizeof(cplx)) == 0;
  };
  if (a.n != b.n || a.t != b.t || a.z != b.z) return false;
  if (!same_field(a.v, b.v)) return false;
  if (a.eta.ledger.size() != b.eta.ledger.size()) return false;
  for (size_t i = 0; i < a.eta.ledger.size(); ++i) {
    if (a.eta.ledger[i].age != b.eta.ledger[i].age) return false;
    if (!same_field(*a.eta.ledger[i].inc, *b.eta.ledger[i].inc)) return false;
  }
  return true;
}

}  // namespace nsmem
