// Birth-death chain with decaying immigration b(t) = 2 e^{-t/2} and unit
// per-individual death rate.  Started from an empty system the law is Poisson
// at every instant, with mean mu(t) = 4 (e^{-t/2} - e^{-t}); the four-factor
// product reproduces it to solver tolerance at each requested time without
// stepping through the times in between.

#include <cmath>
#include <cstdio>

#include "weinorman/models/birth_death.hpp"

using namespace weinorman;

int main() {
  auto model = BirthDeathModel::build(RateFunction::parse("exp:2,-0.5"),
                                      RateFunction::constant(1.0), 30);
  auto fac = model.factorization();
  auto init = model.initial_delta0();

  std::printf("%6s %12s %12s %12s %10s\n", "t", "mean", "exact mean", "P(empty)", "linf");
  for (double t : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    ProbabilityVector p;
    p.values = apply_factorization(fac, t, init.values);
    p.overflow_index = init.overflow_index;
    ProbabilityVector poisson = model.poisson_solution(t);

    double mean = 0.0;
    for (int n = 0; n < model.overflow_index(); ++n) mean += n * p.values[n];
    double exact_mean = 4.0 * (std::exp(-0.5 * t) - std::exp(-t));
    std::printf("%6.2f %12.8f %12.8f %12.8f %10.2e\n", t, mean, exact_mean, p.values[0],
                linf_diff(p.values, poisson.values));
  }
  return 0;
}
