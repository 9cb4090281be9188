#pragma once

#include <functional>
#include <vector>

namespace nsmem {

/// Fading-memory kernel in density form.
///
/// mu = -g' for a relaxation kernel g; kappa = integral of mu over (0,inf).
/// The Dafermos condition mu'(s) + delta mu(s) <= 0 makes the past-history
/// semigroup dissipative; the exponential family satisfies it with equality.
struct KernelSpec {
  double delta = 0.0;  ///< dissipation rate in the Dafermos condition
  double kappa = 0.0;  ///< total mass of mu
  std::function<double(double)> mu;
  std::function<double(double)> mu_prime;
  bool exponential = false;  ///< true for mu(s) = delta^2 exp(-delta s)
};

/// Exponential kernel g(s) = delta e^{-delta s}: mu = delta^2 e^{-delta s},
/// kappa = delta.  Requires delta > 0.
KernelSpec make_kernel(double delta);

/// Evaluates mu'(s_j) + delta mu(s_j) at each node.  Nonpositive values (up
/// to roundoff against mu(s_j)) certify the Dafermos condition there.
std::vector<double> check_dafermos(const KernelSpec& kernel,
                                   const std::vector<double>& s_nodes);

}  // namespace nsmem
