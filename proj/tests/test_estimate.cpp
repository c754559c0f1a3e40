#include <gtest/gtest.h>

#include <random>

#include "bsdiv/estimate.hpp"
#include "oracles.hpp"

using namespace bsdiv;

namespace {

ParametricModel bernoulli_model() {
  return {[](double th) { return NamedFamily::bernoulli(th); }, 0.01, 0.99, FunctionalKind::pmf};
}

}  // namespace

TEST(Estimate, ReverseKlRecoversSampleFrequency) {
  auto data = DiscreteDistribution::empirical({0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 1});
  auto r = min_divergence_estimate(bernoulli_model(), {Generator::reverse_kl()}, data);
  EXPECT_NEAR(r.theta_hat, 8.0 / 13.0, 1e-8);
  EXPECT_NEAR(model_adequacy(r).value(), 0.0, 1e-14);
}

TEST(Estimate, PowerTwoMatchesClosedFormAndDenseScan) {
  // The data puts mass on 2, outside the model support, which moves the optimum to d1 / (d0 + d1).
  auto data = DiscreteDistribution::empirical({0, 0, 1, 1, 1, 2});
  ParametricModel model = bernoulli_model();
  DivergenceTemplate tpl{Generator::power(2.0)};
  auto r = min_divergence_estimate(model, tpl, data);
  EXPECT_NEAR(r.theta_hat, 0.6, 1e-8);

  auto obj = [&](double th) { return mde_objective(model, tpl, data, th).value(); };
  double best = 0.01, bv = obj(best);
  for (int i = 0; i <= 9800; ++i) {
    double th = 0.01 + i * 1e-4;
    if (double v = obj(th); v < bv) bv = v, best = th;
  }
  double lo = best - 1e-4;
  for (int i = 0; i <= 2000; ++i) {
    double th = lo + i * 1e-7;
    if (double v = obj(th); v < bv) bv = v, best = th;
  }
  EXPECT_NEAR(r.theta_hat, best, 1e-6);
  EXPECT_LE(r.min_value.value(), bv + 1e-14);
}

TEST(Estimate, ExponentialRateFromCdfFit) {
  ParametricModel model{[](double th) { return NamedFamily::exponential(th); }, 0.2, 5.0, FunctionalKind::cdf};
  DivergenceTemplate tpl{Generator::kl(), 0.5, QScaling{}, AggregationMeasure::lebesgue(0.0, 20.0, 32, 16)};
  auto r = min_divergence_estimate(model, tpl, NamedFamily::exponential(2.0));
  EXPECT_NEAR(r.theta_hat, 2.0, 1e-6);
}

TEST(Estimate, ConsistencySmoke) {
  std::mt19937_64 rng(1234);
  std::bernoulli_distribution B(0.3);
  double prev_err = 1.0;
  for (int n : {50, 5000}) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = B(rng) ? 1.0 : 0.0;
    auto r = min_divergence_estimate(bernoulli_model(), {Generator::power(0.5)}, DiscreteDistribution::empirical(xs));
    double err = std::abs(r.theta_hat - 0.3);
    EXPECT_LT(err, n == 50 ? 0.15 : 0.02);
    prev_err = err;
  }
  EXPECT_LT(prev_err, 0.02);
}

TEST(Estimate, InfiniteEverywhereIsReported) {
  auto data = DiscreteDistribution::empirical({0, 1, 2});
  try {
    min_divergence_estimate(bernoulli_model(), {Generator::reverse_kl()}, data);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("infinite"), std::string::npos);
  }
}

TEST(EdfStatistics, CramerVonMisesClosedForm) {
  auto unif = NamedFamily::uniform(0.0, 1.0);
  EXPECT_NEAR(cvm_statistic({0.5}, unif).value(), 1.0 / 12.0, 1e-15);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n : {1, 4, 11}) {
    std::vector<double> u(n);
    for (auto& x : u) x = U(rng);
    EXPECT_NEAR(cvm_statistic(u, unif).value(), oracle::cramer_von_mises(u), 1e-12);
  }
}

TEST(EdfStatistics, AndersonDarlingClosedForm) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(0.01, 0.99);
  auto unif = NamedFamily::uniform(0.0, 1.0);
  for (int n : {3, 5, 8}) {
    std::vector<double> u(n);
    for (auto& x : u) x = U(rng);
    double want = oracle::anderson_darling(u);
    EXPECT_NEAR(anderson_darling_statistic(u, unif).value(), want, 1e-8 * std::max(1.0, want));
  }
}

TEST(EdfStatistics, InvariantUnderProbabilityIntegralTransform) {
  auto e = NamedFamily::exponential(3.0);
  std::vector<double> xs = {0.05, 0.2, 0.31, 0.9, 1.4};
  std::vector<double> us;
  for (double x : xs) us.push_back(e.cdf(x));
  auto unif = NamedFamily::uniform(0.0, 1.0);
  EXPECT_NEAR(anderson_darling_statistic(xs, e).value(), anderson_darling_statistic(us, unif).value(), 1e-12);
  EXPECT_NEAR(cvm_statistic(xs, e).value(), cvm_statistic(us, unif).value(), 1e-13);
}

TEST(EdfStatistics, CustomConnectorMatchesNamed) {
  std::vector<double> u = {0.12, 0.31, 0.47, 0.58, 0.93};
  auto unif = NamedFamily::uniform(0.0, 1.0);
  auto named = anderson_darling_statistic(u, unif).value();
  auto custom = weighted_edf_statistic(u, unif, WeightConnector::custom([](double, double v) { return v * (1 - v); }));
  EXPECT_NEAR(custom.value(), named, 1e-8);
  for (const char* id : {"1-v", "1-v2", "v(2-v)", "upow:0.5"}) {
    auto w = WeightConnector::parse(id);
    auto c = WeightConnector::custom([w](double a, double v) { return w(a, v); });
    EXPECT_NEAR(weighted_edf_statistic(u, unif, c).value(), weighted_edf_statistic(u, unif, w).value(), 1e-8) << id;
  }
  EXPECT_NEAR(cvm_statistic(u, unif, [](double) { return 1.0; }).value(), cvm_statistic(u, unif).value(), 1e-12);
}

TEST(EdfStatistics, RejectsDiscreteModels) {
  EXPECT_THROW(cvm_statistic({0.0}, NamedFamily::bernoulli(0.5)), ConfigError);
  EXPECT_THROW(cvm_statistic({}, NamedFamily::uniform(0, 1)), ConfigError);
}
