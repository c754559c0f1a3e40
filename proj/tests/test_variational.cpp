#include <gtest/gtest.h>

#include <random>

#include "bsdiv/variational.hpp"
#include "oracles.hpp"

using namespace bsdiv;

namespace {

DiscreteDistribution on_grid(const std::vector<double>& w) {
  std::vector<double> s(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) s[i] = static_cast<double>(i);
  return DiscreteDistribution(s, w);
}

}  // namespace

TEST(Variational, StrongAndWeakDuality) {
  std::mt19937_64 rng(42);
  for (const auto& g : {Generator::kl(), Generator::reverse_kl(), Generator::power(2.0), Generator::power(0.5),
                        Generator::power(-1.0)}) {
    for (int k = 0; k < 5; ++k) {
      auto q = on_grid(oracle::random_pmf(rng, 5)), p = on_grid(oracle::random_pmf(rng, 5));
      auto rep = verify_attainment(g, q, p, 1000, static_cast<unsigned>(k));
      EXPECT_TRUE(rep.attained) << g.id() << " gap=" << rep.gap;
      EXPECT_TRUE(rep.weak_duality) << g.id() << " excess=" << rep.max_excess;
      EXPECT_EQ(rep.trials, 1000);
    }
  }
}

TEST(Variational, KlDualValue) {
  auto q = on_grid({0.2, 0.3, 0.5}), p = on_grid({0.5, 0.25, 0.25});
  double want = 0.0;
  for (std::size_t i = 0; i < 3; ++i) want += q.weights()[i] * std::log(q.weights()[i] / p.weights()[i]);
  EXPECT_NEAR(divergence_tilde(Generator::kl(), q, p).value(), want, 1e-15);
  auto g = optimal_witness(Generator::kl(), q, p);
  EXPECT_NEAR(dual_objective(Generator::kl(), g, q, p).value(), want, 1e-14);
}

TEST(Variational, UnboundedDualWithoutAbsoluteContinuity) {
  auto q = on_grid({0.5, 0.5}), p = on_grid({1.0, 0.0});
  auto g = Generator::kl();
  EXPECT_TRUE(divergence_tilde(g, q, p).is_pos_inf());
  double prev = -kInfinity;
  for (double M : {1.0, 10.0, 100.0, 1000.0}) {
    double d = dual_objective(g, {0.0, M}, q, p).value();
    EXPECT_NEAR(d, 0.5 * M, 1e-12);
    EXPECT_GT(d, prev);
    prev = d;
  }
  EXPECT_THROW(optimal_witness(g, q, p), ConfigError);
}

TEST(Variational, RestrictedFamilies) {
  auto q = on_grid({0.2, 0.3, 0.5}), p = on_grid({0.4, 0.4, 0.2});
  auto g = Generator::kl();
  double full = divergence_tilde(g, q, p).value();
  WitnessFamily all{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  EXPECT_NEAR(restricted_dual_sup(g, all, q, p, 2000).value(), full, 1e-6);
  WitnessFamily line{{{0, 0, 1}}};
  double part = restricted_dual_sup(g, line, q, p).value();
  EXPECT_LE(part, full + 1e-12);
  // One coordinate: sup over b of 0.5 b - 0.2 (e^b - 1), attained at b = log(2.5).
  double b = std::log(2.5);
  EXPECT_NEAR(part, 0.5 * b - 0.2 * std::expm1(b), 1e-8);
}

TEST(Variational, SupportMismatch) {
  auto q = on_grid({0.5, 0.5});
  DiscreteDistribution p({0.0, 2.0}, {0.5, 0.5});
  EXPECT_THROW(divergence_tilde(Generator::kl(), q, p), ConfigError);
  EXPECT_THROW(dual_objective(Generator::kl(), {0.0}, q, q), ConfigError);
}
