#include <gtest/gtest.h>

#include "bsdiv/dependence.hpp"
#include "oracles.hpp"

using namespace bsdiv;

TEST(Dependence, ProductLawHasNoInformation) {
  std::vector<double> a = {0.2, 0.3, 0.5}, b = {0.6, 0.4};
  std::vector<double> m;
  for (double x : a)
    for (double y : b) m.push_back(x * y);
  JointDiscrete j({0, 1, 2}, {0, 1}, m);
  EXPECT_LE(std::abs(mutual_information(j).value()), 1e-12);
  EXPECT_LE(std::abs(phi_dependence(Generator::power(0.5), j).value.value()), 1e-12);
  EXPECT_LE(cdf_dependence(j, CdfDependenceMode::l2), 1e-15);
}

TEST(Dependence, DiagonalLaw) {
  JointDiscrete j({0, 1}, {0, 1}, {0.5, 0.0, 0.0, 0.5});
  EXPECT_NEAR(mutual_information(j).value(), std::log(2.0), 1e-15);
  // Against a direct sum over cells.
  JointDiscrete k({0, 1}, {0, 1}, {0.1, 0.3, 0.4, 0.2});
  double want = 0.0;
  auto r = k.row_marginal(), c = k.col_marginal();
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) want += k.mass(a, b) * std::log(k.mass(a, b) / (r[a] * c[b]));
  EXPECT_NEAR(mutual_information(k).value(), want, 1e-15);
}

TEST(Dependence, FromTriples) {
  auto j = JointDiscrete::from_triples({{0, 0, 0.5}, {1, 1, 0.5}});
  EXPECT_EQ(j.n_rows(), 2u);
  EXPECT_EQ(j.mass(0, 1), 0.0);
  EXPECT_THROW(JointDiscrete({0}, {0}, {0.5}), ConfigError);
}

TEST(Dependence, FarlieGumbelMorgenstern) {
  for (double th : {0.5, -0.8, 1.0}) {
    auto fgm = [th](double u, double v) { return 1.0 + th * (1 - 2 * u) * (1 - 2 * v); };
    auto grid = CopulaGrid::from_density(fgm);
    EXPECT_NEAR(copula_phi_dependence(Generator::squared(), grid).value(), th * th / 18.0, 1e-12);
    auto indep = CopulaGrid::from_density([](double, double) { return 1.0; });
    EXPECT_NEAR(copula_divergence(Generator::squared(), grid, indep).value(), th * th / 18.0, 1e-12);
  }
}

TEST(Dependence, ComonotoneCopulaCdfDistances) {
  auto M = [](double u, double v) { return std::min(u, v); };
  EXPECT_NEAR(copula_cdf_dependence(M, CdfDependenceMode::tv), 1.0 / 12.0, 1e-6);
  EXPECT_NEAR(copula_cdf_dependence(M, CdfDependenceMode::l2), 1.0 / 90.0, 1e-6);
  EXPECT_NEAR(copula_cdf_dependence([](double u, double v) { return u * v; }, CdfDependenceMode::tv), 0.0, 1e-15);
}

TEST(Dependence, CopulaGridValidation) {
  EXPECT_THROW(CopulaGrid::from_density([](double, double) { return 2.0; }), ConfigError);
  EXPECT_THROW(CopulaGrid::from_matrix({{1.0, 1.0}, {1.0}}), ConfigError);
  auto g = CopulaGrid::from_matrix({{2.0, 0.0}, {0.0, 2.0}});
  EXPECT_NEAR(copula_phi_dependence(Generator::kl(), g).value(), std::log(2.0), 1e-15);
  auto h = CopulaGrid::from_matrix({{1.0}});
  EXPECT_THROW(copula_divergence(Generator::kl(), g, h), ConfigError);
}

TEST(CumulativePaired, SquaredGeneratorExactValue) {
  auto m = AggregationMeasure::lebesgue(0.0, 1.0, 8, 16);
  auto v = cumulative_paired_divergence(
      Generator::squared(), [](double x) { return x * x; }, [](double x) { return x; }, m);
  EXPECT_NEAR(v.value(), 1.0 / 12.0, 1e-14);
}

TEST(CumulativePaired, KlBetweenExponentialsAgainstRiemannSum) {
  auto fp = [](double x) { return -std::expm1(-2.0 * x); };
  auto fq = [](double x) { return -std::expm1(-x); };
  auto phi = [](double t) { return t == 0.0 ? 1.0 : t * std::log(t) + 1.0 - t; };
  double want = oracle::midpoint(
      [&](double z) {
        double sa = std::exp(-2.0 * z), sb = std::exp(-z);
        return sb * phi(sa / sb) + fq(z) * phi(fp(z) / fq(z));
      },
      0.0, 40.0, 400000);
  auto got = cumulative_paired_divergence(Generator::kl(), fp, fq, AggregationMeasure::lebesgue(0.0, 40.0, 64, 16));
  EXPECT_NEAR(got.value(), want, 1e-8);
}

TEST(CumulativePaired, WindowWarningsAndGeneratorCheck) {
  auto p = NamedFamily::exponential(2.0), q = NamedFamily::exponential(1.0);
  EXPECT_TRUE(cpd_window_warnings(p, q, 0.0, 40.0).empty());
  EXPECT_EQ(cpd_window_warnings(p, q, 0.0, 3.0).size(), 1u);
  auto shifted = Generator::custom(0.0, kInfinity, {.phi = [](double t) { return (t - 1) * (t - 1) + 1.0; }});
  EXPECT_THROW(cumulative_paired_divergence(shifted, [](double) { return 0.5; }, [](double) { return 0.5; },
                                            AggregationMeasure::counting({0.0})),
               ConfigError);
}

TEST(CumulativePaired, EntropyOfPointMass) {
  auto step = [](double x) { return x < 0.5 ? 0.0 : 1.0; };
  auto m = AggregationMeasure::lebesgue(0.0, 1.0, 64, 16);
  EXPECT_NEAR(cumulative_phi_entropy(Generator::squared(), step, m).value(), 0.5, 1e-14);
  // Uniform cdf under KL: twice the integral of x log x + 1 - x.
  EXPECT_NEAR(cumulative_phi_entropy(Generator::kl(), [](double x) { return x; }, m).value(), 0.5, 1e-8);
}
