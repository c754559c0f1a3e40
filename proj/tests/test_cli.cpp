#include <gtest/gtest.h>

#include "bsdiv/cli.hpp"

using namespace bsdiv;
using namespace bsdiv::cli;

namespace {

std::string data(const char* f) { return std::string(BSDIV_TEST_DATA) + "/" + f; }

RunConfig div_config() {
  RunConfig r;
  r.command = "div";
  r.p = data("p.csv");
  r.q = data("q.csv");
  return r;
}

}  // namespace

TEST(Cli, ConfigRoundTripsThroughJson) {
  RunConfig r = div_config();
  r.gen = "power";
  r.alpha = 0.3;
  r.window = std::pair{-1.0, 2.5};
  r.seed = 99;
  r.bracket = std::pair{0.1, 0.9};
  r.m2 = 2.0;
  EXPECT_EQ(from_json(to_json(r)), r);
  EXPECT_EQ(from_json(json::parse(to_json(r).dump())), r);
}

TEST(Cli, DivergenceReportShape) {
  auto rep = run(div_config());
  ASSERT_EQ(rep.exit_code, 0) << rep.body.dump(2);
  EXPECT_NEAR(rep.body["value"].get<double>(), 0.14384103622589045, 1e-15);
  for (const char* k : {"command", "config_echo", "value", "breakdown", "diagnostics", "provenance"})
    EXPECT_TRUE(rep.body.contains(k)) << k;
  EXPECT_EQ(rep.body["provenance"]["version"], kVersion);
}

TEST(Cli, RunsAreDeterministic) {
  RunConfig r;
  r.command = "ot-verify";
  r.seed = 7;
  r.trials = 10;
  EXPECT_EQ(run(r).body.dump(), run(r).body.dump());
  r.command = "dual";
  r.p = data("three_point.csv");
  r.q = data("three_point.csv");
  EXPECT_EQ(run(r).body.dump(), run(r).body.dump());
}

TEST(Cli, ExitCodes) {
  RunConfig bad = div_config();
  bad.gen = "nope";
  auto rep = run(bad);
  EXPECT_EQ(rep.exit_code, 2);
  EXPECT_EQ(rep.body["error"]["kind"], "config");
  EXPECT_TRUE(rep.body["value"].is_null());

  RunConfig missing = div_config();
  missing.q = data("does_not_exist.csv");
  EXPECT_EQ(run(missing).exit_code, 2);

  RunConfig alpha = div_config();
  alpha.gen = "power";
  EXPECT_EQ(run(alpha).exit_code, 2);

  RunConfig mde;
  mde.command = "mde";
  mde.gen = "rkl";
  mde.model = "bern";
  mde.p = data("three_point.csv");
  EXPECT_EQ(run(mde).exit_code, 3);

  RunConfig cpd = div_config();
  cpd.command = "cpd";
  EXPECT_EQ(run(cpd).exit_code, 2);
}

TEST(Cli, ValidationWarnings) {
  RunConfig r = div_config();
  r.p = data("three_point.csv");
  r.gen = "power";
  r.alpha = 2.0;
  auto issues = validate(r);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].level, Issue::Level::warning);
  auto rep = run(r);
  EXPECT_EQ(rep.body["value"], "inf");
  EXPECT_FALSE(rep.body["diagnostics"]["warnings"].empty());
}

TEST(Cli, OtherCommands) {
  RunConfig dep;
  dep.command = "dep";
  dep.p = data("diag_joint.csv");
  auto d = run(dep);
  ASSERT_EQ(d.exit_code, 0) << d.body.dump(2);
  EXPECT_NEAR(d.body["value"].get<double>(), std::log(2.0), 1e-15);

  RunConfig gof;
  gof.command = "gof";
  gof.p = data("unif_samples.csv");
  gof.q = "unif:0:1";
  gof.scaling = "unit";
  auto g = run(gof);
  ASSERT_EQ(g.exit_code, 0) << g.body.dump(2);

  RunConfig bayes = div_config();
  bayes.command = "bayes";
  auto b = run(bayes);
  ASSERT_EQ(b.exit_code, 0) << b.body.dump(2);
  EXPECT_TRUE(b.body["details"]["bounds_hold"].get<bool>());

  RunConfig cpd = div_config();
  cpd.command = "cpd";
  cpd.p = "exp:2";
  cpd.q = "exp:1";
  cpd.window = std::pair{0.0, 40.0};
  auto c = run(cpd);
  ASSERT_EQ(c.exit_code, 0) << c.body.dump(2);
  EXPECT_GT(c.body["value"].get<double>(), 0.0);
}
