#include <gtest/gtest.h>

#include <random>

#include "bsdiv/functional.hpp"
#include "bsdiv/measure.hpp"
#include "oracles.hpp"

using namespace bsdiv;

TEST(Functional, QuantileIsGaloisInverseOfCdf) {
  DiscreteDistribution d({1.0, 2.0, 3.0}, {0.2, 0.5, 0.3});
  auto F = StatFunctional::cdf(d), Q = StatFunctional::quantile(d);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(1e-6, 1.0 - 1e-6), X(0.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    double u = U(rng), x = X(rng);
    EXPECT_EQ(Q(u).value() <= x, u <= F(x).value()) << "u=" << u << " x=" << x;
  }
}

TEST(Functional, QuantileOfThreePointLaw) {
  DiscreteDistribution d({1.0, 2.0, 3.0}, {0.2, 0.5, 0.3});
  auto Q = StatFunctional::quantile(d);
  EXPECT_EQ(Q(0.1).value(), 1.0);
  EXPECT_EQ(Q(0.2).value(), 1.0);
  EXPECT_EQ(Q(0.2000001).value(), 2.0);
  EXPECT_EQ(Q(0.7).value(), 2.0);
  EXPECT_EQ(Q(0.9).value(), 3.0);
  EXPECT_THROW(Q(0.0), DomainError);
  EXPECT_THROW(Q(1.0), DomainError);
}

TEST(Functional, ContinuousFamilies) {
  auto n = NamedFamily::normal(0.0, 1.0);
  EXPECT_NEAR(StatFunctional::cdf(n)(1.0).value(), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(StatFunctional::quantile(n)(0.8413447460685429).value(), 1.0, 1e-12);
  EXPECT_NEAR(StatFunctional::survival(NamedFamily::exponential(2.0))(0.5).value(), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(StatFunctional::density(NamedFamily::uniform(0.0, 4.0))(1.0).value(), 0.25, 1e-15);
  EXPECT_EQ(StatFunctional::centered_rank(NamedFamily::uniform(0.0, 1.0))(0.75).value(), 0.5);
}

TEST(Functional, MomentGeneratingFunctions) {
  EXPECT_NEAR(StatFunctional::mgf(NamedFamily::exponential(2.0))(1.0).value(), 2.0, 1e-14);
  EXPECT_TRUE(StatFunctional::mgf(NamedFamily::exponential(2.0))(2.5).is_pos_inf());
  EXPECT_NEAR(StatFunctional::mgf(NamedFamily::normal(1.0, 2.0))(0.5).value(), std::exp(0.5 + 0.5), 1e-13);
  DiscreteDistribution d({0.0, 1.0}, {0.5, 0.5});
  EXPECT_NEAR(StatFunctional::mgf(d)(1.0).value(), 0.5 * (1.0 + std::exp(1.0)), 1e-15);
  EXPECT_NEAR(StatFunctional::mgf(NamedFamily::uniform(0.0, 1.0))(1.0).value(), std::exp(1.0) - 1.0, 1e-14);
}

TEST(Functional, ReliabilityTransforms) {
  auto e = NamedFamily::exponential(1.5);
  EXPECT_NEAR(StatFunctional::hazard(e)(0.7).value(), 1.5, 1e-13);
  // Memoryless: residual survival equals the unshifted survival.
  EXPECT_NEAR(StatFunctional::residual_survival(e, 2.0)(2.8).value(), e.survival(0.8), 1e-14);
  EXPECT_NEAR(StatFunctional::residual_density(e, 1.0)(1.5).value(), e.pdf(0.5), 1e-13);
  auto u = NamedFamily::uniform(0.0, 1.0);
  EXPECT_NEAR(StatFunctional::past_density(u, 0.5)(0.2).value(), 2.0, 1e-15);
  EXPECT_THROW(StatFunctional::past_density(u, 0.5)(0.7), DomainError);
  EXPECT_THROW(StatFunctional::hazard(NamedFamily::bernoulli(0.3)), ConfigError);
}

TEST(Functional, OrderStatisticDensityIsBeta) {
  auto u = NamedFamily::uniform(0.0, 1.0);
  auto f = StatFunctional::order_statistic_density(u, 2, 5);
  for (double x : {0.1, 0.4, 0.9}) EXPECT_NEAR(f(x).value(), 20.0 * x * std::pow(1 - x, 3), 1e-12);
  double mass = oracle::simpson([&](double x) { return f(x).value(); }, 0.0, 1.0, 2000);
  EXPECT_NEAR(mass, 1.0, 1e-10);
}

TEST(Functional, QuantileDensity) {
  auto e = NamedFamily::exponential(2.0);
  auto q = StatFunctional::quantile_density(e);
  for (double u : {0.1, 0.5, 0.9}) EXPECT_NEAR(q(u).value(), 1.0 / (2.0 * (1.0 - u)), 1e-6);
}

TEST(Functional, IntegratedCdf) {
  auto base = StatFunctional::cdf(NamedFamily::uniform(0.0, 1.0));
  auto I = integrated_functional(base, AggregationMeasure::lebesgue(0.0, 1.0, 8, 16));
  EXPECT_NEAR(I(1.0).value(), 0.5, 1e-14);
  EXPECT_NEAR(I(0.5).value(), 0.125, 1e-14);
  EXPECT_EQ(I(-1.0).value(), 0.0);
}

TEST(Distribution, EmpiricalAndParse) {
  auto d = DiscreteDistribution::empirical({3.0, 1.0, 3.0, 2.0});
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.pmf(3.0), 0.5);
  EXPECT_EQ(d.cdf(2.5), 0.5);
  EXPECT_EQ(d.cdf(3.0), 1.0);
  EXPECT_THROW(DiscreteDistribution({0.0, 1.0}, {0.5, 0.6}), ConfigError);
  EXPECT_THROW(DiscreteDistribution({1.0, 1.0}, {0.5, 0.5}), ConfigError);
  EXPECT_EQ(NamedFamily::parse("exp:2").id(), "exp:2");
  EXPECT_THROW(NamedFamily::parse("exp:-1"), ConfigError);
  EXPECT_THROW(NamedFamily::parse("gamma:2"), ConfigError);
}
