#include <gtest/gtest.h>

#include "bsdiv/measure.hpp"
#include "oracles.hpp"

using namespace bsdiv;

TEST(Measure, GaussLegendreIsExactOnPolynomials) {
  for (int n : {4, 8, 16, 32}) {
    const auto& rule = gauss_legendre(n);
    for (int k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * std::pow(rule.x[i], k);
      double want = k % 2 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(s, want, 1e-13) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Measure, LebesgueIntegratesSmoothFunctions) {
  auto m = AggregationMeasure::lebesgue(0.0, M_PI, 8, 16);
  EXPECT_NEAR(integrate(m, [](double x) { return ExtendedReal(std::sin(x)); }).value(), 2.0, 1e-14);
}

TEST(Measure, IntegrationIsLinear) {
  auto m = AggregationMeasure::lebesgue(-1.0, 2.0, 4, 8);
  auto f = [](double x) { return std::exp(x); };
  auto g = [](double x) { return std::cos(3 * x); };
  double a = 1.7, b = -0.4;
  double lhs = integrate(m, [&](double x) { return ExtendedReal(a * f(x) + b * g(x)); }).value();
  double rhs = a * integrate(m, [&](double x) { return ExtendedReal(f(x)); }).value() +
               b * integrate(m, [&](double x) { return ExtendedReal(g(x)); }).value();
  EXPECT_NEAR(lhs, rhs, 1e-13);
}

TEST(Measure, CountingAndWeighted) {
  auto c = AggregationMeasure::counting({2.0, 1.0, 2.0});
  EXPECT_EQ(c.node_count(), 2u);
  EXPECT_EQ(integrate(c, [](double x) { return ExtendedReal(x); }).value(), 3.0);
  DiscreteDistribution d({0.0, 1.0}, {0.25, 0.75});
  EXPECT_EQ(integrate(AggregationMeasure::weighted(d), [](double x) { return ExtendedReal(x); }).value(), 0.75);
  auto e = AggregationMeasure::weighted(NamedFamily::exponential(1.0));
  EXPECT_NEAR(integrate(e, [](double x) { return ExtendedReal(x); }).value(), 1.0, 1e-6);
}

TEST(Measure, RefineOnZeroConvergesImmediately) {
  auto r = refine_until(AggregationMeasure::lebesgue(0.0, 1.0, 4, 4), [](double) { return ExtendedReal(0.0); }, 1e-10);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.panels, 8);
}

TEST(Measure, RefineOnEndpointSingularity) {
  auto r = refine_until(AggregationMeasure::lebesgue(0.0, 1.0, 4, 16),
                        [](double x) { return ExtendedReal(-std::log1p(-x)); }, 1e-6);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value.value(), 1.0, 1e-5);
  EXPECT_LT(r.achieved_delta, 1e-6);
}

TEST(Measure, RefineReportsNonConvergence) {
  auto r = refine_until(AggregationMeasure::lebesgue(0.0, 1.0, 1, 4),
                        [](double x) { return ExtendedReal(1.0 / std::sqrt(x)); }, 1e-14, 2);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.achieved_delta, 0.0);
}

TEST(Measure, FailuresCarryNodeLocation) {
  auto m = AggregationMeasure::counting({0.5, 1.5});
  try {
    integrate(m, [](double x) -> ExtendedReal {
      if (x > 1.0) throw DomainError("bad");
      return 0.0;
    });
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("x=1.5"), std::string::npos);
  }
  EXPECT_THROW(refine_until(m, [](double) { return ExtendedReal(0.0); }, 0.0), ConfigError);
}

TEST(Measure, RestrictionKeepsNodesBelowCut) {
  auto m = AggregationMeasure::counting({1.0, 2.0, 3.0});
  EXPECT_EQ(m.restricted_to(2.0)->node_count(), 2u);
  EXPECT_FALSE(m.restricted_to(0.5).has_value());
  auto l = AggregationMeasure::lebesgue(0.0, 2.0, 8, 8);
  EXPECT_NEAR(integrate(*l.restricted_to(1.0), [](double) { return ExtendedReal(1.0); }).value(), 1.0, 1e-14);
}
