// Steady-state squeezing at one point of the reference parameter set.

#include <iostream>

#include "qwsqueeze/qwsqueeze.hpp"

int main() {
  using namespace qwsqueeze;

  SystemParams p = reference_parameters();
  const Couplings c = Couplings::from_ratio(kReferenceGMinus, 0.9);

  const LinearSystem sys = build_linear_system(p, c);
  const StabilityVerdict verdict = check_stability(sys.drift);
  std::cout << "max Re(lambda) = " << verdict.margin << '\n';
  if (!verdict.stable) return 2;

  const CovarianceMatrix v = solve_lyapunov(sys.drift, sys.diffusion, verdict);
  const SqueezingResult s = minimize_variance(v);
  std::cout << "S_min = " << s.S_min << " (" << s.dB << " dB), theta = " << s.theta_opt << '\n';
  return 0;
}
