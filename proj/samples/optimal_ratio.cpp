// Best coupling ratio G+/G- for a few cavity decay rates and bath occupations.

#include <cstdio>

#include "qwsqueeze/qwsqueeze.hpp"

int main() {
  using namespace qwsqueeze;

  for (double n_th : {0.0, 10.0, 50.0}) {
    SweepSpec spec;
    spec.base = reference_parameters(2.0, n_th);
    spec.drive = DirectDrive{kReferenceGMinus, 0.0};
    spec.axis1 = Axis::linspace(SweepParameter::ratio, 0.0, 0.99, 400);
    spec.axis2 = Axis{SweepParameter::kappa, {0.1, 1.0, 5.0}};
    const SweepResult r = run_sweep(spec);

    for (std::size_t j = 0; j < r.n2(); ++j) {
      double best_db = -1e300, best_ratio = 0.0;
      for (std::size_t i = 0; i < r.n1(); ++i) {
        const auto& rec = r.at(i, j);
        if (rec.squeezing && rec.squeezing->dB > best_db) {
          best_db = rec.squeezing->dB;
          best_ratio = r.axis1[i];
        }
      }
      std::printf("n_th = %4.0f  kappa = %.1f  best ratio = %.3f  -> %6.2f dB\n", n_th, r.axis2[j], best_ratio,
                  best_db);
    }
  }
  return 0;
}
