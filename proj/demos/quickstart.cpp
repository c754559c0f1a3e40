// Divergences between two small pmfs under a few generators, then a goodness-of-fit statistic.
#include <iostream>

#include "bsdiv/bsdiv.hpp"

int main() {
  using namespace bsdiv;
  DiscreteDistribution p({0, 1, 2}, {0.2, 0.5, 0.3});
  DiscreteDistribution q({0, 1, 2}, {0.3, 0.3, 0.4});

  for (const char* id : {"kl", "rkl", "hellinger", "chi2-pearson", "tv"}) {
    auto d = casm_divergence(Generator::from_id(id), p, q);
    std::cout << id << ": " << d.value << "\n";
  }
  std::cout << "singular bound for power:0.5: " << singular_bound(Generator::power(0.5)) << "\n";

  std::vector<double> sample{0.12, 0.31, 0.47, 0.58, 0.93};
  auto model = NamedFamily::uniform(0.0, 1.0);
  std::cout << "Cramer-von Mises: " << cvm_statistic(sample, model) << "\n";
  std::cout << "Anderson-Darling: " << anderson_darling_statistic(sample, model) << "\n";
}
