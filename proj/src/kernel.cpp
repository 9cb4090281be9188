#include "nsmem/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace nsmem {

KernelSpec make_kernel(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("make_kernel: delta <= 0");
  KernelSpec k;
  k.delta = delta;
  k.kappa = delta;
  k.mu = [delta](double s) { return delta * delta * std::exp(-delta * s); };
  k.mu_prime = [delta](double s) {
    return -delta * delta * delta * std::exp(-delta * s);
  };
  k.exponential = true;
  return k;
}

std::vector<double> check_dafermos(const KernelSpec& kernel,
                                   const std::vector<double>& s_nodes) {
  std::vector<double> r(s_nodes.size());
  for (size_t j = 0; j < s_nodes.size(); ++j)
    r[j] = kernel.mu_prime(s_nodes[j]) + kernel.delta * kernel.mu(s_nodes[j]);
  return r;
}

}  // namespace nsmem
