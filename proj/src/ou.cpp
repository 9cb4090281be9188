#include "nsmem/ou.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nsmem {

double ou_advance(double z, double sigma, double dt, double dW) {
  const double e = std::exp(-sigma * dt);
  const double var = (1.0 - e * e) / (2.0 * sigma);
  // dW carries variance dt; rescale so the realized update variance is exact
  const double g = std::sqrt(var / dt);
  return e * z + g * dW;
}

PullbackValue ou_pullback(const NoisePath& path, double sigma, double t,
                          double T_trunc) {
  if (!(path.dt > 0.0)) throw std::invalid_argument("ou_pullback: dt <= 0");
  const auto align = [&](double x) {
    const double nd = x / path.dt;
    const auto n = static_cast<int64_t>(std::llround(nd));
    if (std::abs(nd - static_cast<double>(n)) > 1e-9)
      throw std::invalid_argument("ou_pullback: times must be multiples of dt");
    return n;
  };
  const int64_t nt = align(t);
  const int64_t n0 = nt - align(T_trunc);
  PullbackValue out;
  for (int64_t n = n0; n < nt; ++n)
    out.z = ou_advance(out.z, sigma, path.dt, path.increment(n));
  out.bound = 3.0 * std::exp(-sigma * T_trunc) / std::sqrt(2.0 * sigma);
  return out;
}

ErgodicReport ergodic_average_check(uint64_t seed, double sigma, double dt,
                                    int64_t nsteps) {
  NoisePath path{seed, dt};
  ErgodicReport r;
  r.expected_z2 = 1.0 / (2.0 * sigma);
  r.expected_z4 = 3.0 / (4.0 * sigma * sigma);
  r.expected = r.expected_z2 + r.expected_z4;
  r.strict_bound = 1.0 / (4.0 * sigma);
  r.strict_bound_holds = r.expected <= r.strict_bound;

  const int nbatch = 64;
  const int64_t batch_len = nsteps / nbatch;
  std::vector<double> b1(nbatch, 0.0), b2(nbatch, 0.0), b4(nbatch, 0.0);
  double z = 0.0;
  // spin up one relaxation window so batches sample the stationary law
  const auto burn = static_cast<int64_t>(std::ceil(10.0 / (sigma * dt)));
  for (int64_t n = -burn; n < 0; ++n)
    z = ou_advance(z, sigma, dt, path.increment(n));
  for (int64_t n = 0; n < batch_len * nbatch; ++n) {
    z = ou_advance(z, sigma, dt, path.increment(n));
    const auto k = static_cast<size_t>(n / batch_len);
    const double z2 = z * z;
    b1[k] += z2 + z2 * z2;
    b2[k] += z2;
    b4[k] += z2 * z2;
  }
  // batch means absorb the OU autocorrelation into the SE estimate
  auto reduce = [&](std::vector<double>& batch, double& mean, double& se) {
    for (auto& b : batch) b /= static_cast<double>(batch_len);
    mean = 0.0;
    for (double b : batch) mean += b;
    mean /= nbatch;
    double var = 0.0;
    for (double b : batch) var += (b - mean) * (b - mean);
    var /= (nbatch - 1);
    se = std::sqrt(var / nbatch);
  };
  reduce(b1, r.mean_beta1, r.stderr_batch);
  reduce(b2, r.mean_z2, r.stderr_z2);
  reduce(b4, r.mean_z4, r.stderr_z4);
  r.within_3se = std::abs(r.mean_beta1 - r.expected) <= 3.0 * r.stderr_batch;
  r.within_3se_z2 =
      std::abs(r.mean_z2 - r.expected_z2) <= 3.0 * r.stderr_z2;
  r.within_3se_z4 =
      std::abs(r.mean_z4 - r.expected_z4) <= 3.0 * r.stderr_z4;
  return r;
}

}  // namespace nsmem
