#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bsdiv/cli.hpp"

namespace {

void add_flags(CLI::App* sub, bsdiv::cli::RunConfig& r, std::string& window, std::string& bracket) {
  sub->add_option("--gen", r.gen, "generator id: power, kl, rkl, chi2-pearson, chi2-neyman, hellinger, tv, squared");
  sub->add_option("--alpha", r.alpha, "exponent for --gen power");
  sub->add_option("--c", r.c, "subgradient selector in [0, 1]");
  sub->add_option("--scaling", r.scaling, "unit | q | adaptive:<w-id> | explicit");
  sub->add_option("--measure", r.measure, "counting | lebesgue:<lo>:<hi>:<panels> | weighted:<dist-spec>");
  sub->add_option("--functional", r.functional, "pmf | density | cdf | survival | quantile | centered-rank");
  sub->add_option("--p", r.p, "first input: CSV path or family spec");
  sub->add_option("--q", r.q, "second input: CSV path or family spec");
  sub->add_option("--window", window, "integration window lo:hi");
  sub->add_option("--rel-tol", r.rel_tol, "relative tolerance for quadrature refinement");
  sub->add_option("--seed", r.seed, "random seed");
  sub->add_option("--out", r.out, "write the JSON report here instead of stdout");
  sub->add_option("--cost", r.cost, "ot-verify cost: squared | abs | tv | kl | power:<a>");
  sub->add_option("--n", r.n, "ot-verify: largest number of atoms per marginal");
  sub->add_option("--trials", r.trials, "ot-verify / dual: number of random trials");
  sub->add_option("--model", r.model, "mde model: bern | exp | norm-mean:<sigma>");
  sub->add_option("--bracket", bracket, "mde parameter bracket lo:hi");
  sub->add_option("--prior", r.prior, "bayes: prior probability of H");
  sub->add_option("--chi", r.chi, "bayes: exponent of the power bounds in (0, 1)");
  sub->add_option("--m1", r.m1, "explicit scaling m1");
  sub->add_option("--m2", r.m2, "explicit scaling m2");
  sub->add_option("--m3", r.m3, "explicit scaling m3");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaled Bregman divergences between statistical functionals"};
  app.require_subcommand(1);
  bsdiv::cli::RunConfig r;
  std::string window, bracket;
  const char* commands[][2] = {{"div", "divergence between two inputs"},
                               {"gof", "EDF goodness-of-fit statistic"},
                               {"mde", "minimum-divergence estimate"},
                               {"ot-verify", "check comonotone optimality on random instances"},
                               {"dep", "dependence of a joint pmf or copula grid"},
                               {"cpd", "cumulative paired divergence"},
                               {"bayes", "statistical information and power bounds"},
                               {"dual", "variational duality check"}};
  for (auto& c : commands) add_flags(app.add_subcommand(c[0], c[1]), r, window, bracket);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  r.command = app.get_subcommands().front()->get_name();
  try {
    if (!window.empty()) r.window = bsdiv::cli::parse_range(window, "--window");
    if (!bracket.empty()) r.bracket = bsdiv::cli::parse_range(bracket, "--bracket");
  } catch (const bsdiv::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  auto rep = bsdiv::cli::run(r);
  std::string text = rep.body.dump(2) + "\n";
  if (r.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(r.out);
    if (!f) {
      std::cerr << "cannot write '" << r.out << "'\n";
      return 2;
    }
    f << text;
  }
  if (rep.exit_code != 0 && rep.body.contains("error")) std::cerr << rep.body["error"]["message"].get<std::string>() << "\n";
  return rep.exit_code;
}
