#include <gtest/gtest.h>

#include "bsdiv/bayes.hpp"

using namespace bsdiv;

TEST(Bayes, StatisticalInformationExample) {
  DiscreteDistribution h({0.0, 1.0}, {0.8, 0.2}), a({0.0, 1.0}, {0.4, 0.6});
  DecisionProblem d{0.5, h, a};
  EXPECT_DOUBLE_EQ(prior_bayes_risk(d), 0.5);
  EXPECT_NEAR(posterior_bayes_risk(d), 0.3, 1e-15);
  EXPECT_NEAR(statistical_information(d), 0.2, 1e-15);
  DecisionProblem same{0.3, h, h};
  EXPECT_NEAR(statistical_information(same), 0.0, 1e-15);
  DecisionProblem bad{1.5, h, a};
  EXPECT_THROW(prior_bayes_risk(bad), ConfigError);
}

TEST(Bayes, InformationIsHalfTotalVariationAtEvenOdds) {
  DiscreteDistribution h({0.0, 1.0, 2.0}, {0.5, 0.3, 0.2}), a({1.0, 2.0, 3.0}, {0.1, 0.6, 0.3});
  double tv = 0.5 + 0.2 + 0.4 + 0.3;
  EXPECT_NEAR(statistical_information({0.5, h, a}), 0.25 * tv, 1e-15);
}

TEST(Bayes, AverageInformationEqualsDivergence) {
  DiscreteDistribution h({0.0, 1.0, 2.0}, {0.5, 0.3, 0.2}), a({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
  for (double alpha : {0.5, 2.0, -1.0}) {
    auto r = average_information_check(Generator::power(alpha), h, a, 1e-8);
    EXPECT_LT(r.gap, 1e-3 * std::max(1.0, r.rhs)) << alpha << " lhs=" << r.lhs << " rhs=" << r.rhs;
  }
  auto kl = average_information_check(Generator::kl(), h, a, 1e-8);
  EXPECT_LT(kl.gap, 1e-3);
  EXPECT_THROW(average_information_check(Generator::squared_full_line(), h, a), ConfigError);
}

TEST(Bayes, PowerSandwichOverGrid) {
  DiscreteDistribution h({0.0, 1.0, 2.0}, {0.6, 0.3, 0.1}), a({0.0, 1.0, 3.0}, {0.1, 0.5, 0.4});
  for (double chi : {0.1, 0.25, 0.5, 0.75, 0.9})
    for (double prior : {0.05, 0.3, 0.5, 0.8})
      for (double ca : {0.5, 1.0, 3.0}) {
        auto b = power_bound_sandwich({prior, h, a, 1.0, ca}, chi);
        EXPECT_TRUE(b.holds) << chi << " " << prior << " " << ca << ": " << b.lower << " <= " << b.risk
                             << " <= " << b.upper;
      }
  EXPECT_THROW(power_bound_sandwich({0.5, h, a}, 1.0), ConfigError);
}
