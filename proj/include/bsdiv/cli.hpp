#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bayes.hpp"
#include "core.hpp"
#include "dependence.hpp"
#include "estimate.hpp"
#include "io.hpp"
#include "transport.hpp"
#include "variational.hpp"

namespace bsdiv::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
  std::string command;
  std::string gen = "kl";
  std::optional<double> alpha;
  double c = 0.5;
  std::string scaling = "q";
  std::string measure;
  std::string functional = "pmf";
  std::string p, q;
  std::optional<std::pair<double, double>> window;
  double rel_tol = 1e-8;
  std::uint64_t seed = 0;
  std::string out;
  // command-specific
  std::string cost = "squared";
  int n = 4;
  int trials = 100;
  std::string model;
  std::optional<std::pair<double, double>> bracket;
  double prior = 0.5;
  double chi = 0.5;
  double m1 = 1.0, m2 = 1.0, m3 = 1.0;

  bool operator==(const RunConfig&) const = default;
};

inline json to_json(const RunConfig& r) {
  auto pair = [](const std::optional<std::pair<double, double>>& w) {
    return w ? json::array({w->first, w->second}) : json(nullptr);
  };
  return json{{"command", r.command}, {"gen", r.gen},           {"alpha", r.alpha ? json(*r.alpha) : json(nullptr)},
              {"c", r.c},             {"scaling", r.scaling},   {"measure", r.measure},
              {"functional", r.functional}, {"p", r.p},         {"q", r.q},
              {"window", pair(r.window)},   {"rel_tol", r.rel_tol}, {"seed", r.seed},
              {"out", r.out},         {"cost", r.cost},         {"n", r.n},
              {"trials", r.trials},   {"model", r.model},       {"bracket", pair(r.bracket)},
              {"prior", r.prior},     {"chi", r.chi},           {"m1", r.m1},
              {"m2", r.m2},           {"m3", r.m3}};
}

inline RunConfig from_json(const json& j) {
  RunConfig r;
  auto pair = [](const json& v) -> std::optional<std::pair<double, double>> {
    if (v.is_null()) return std::nullopt;
    return std::pair{v.at(0).get<double>(), v.at(1).get<double>()};
  };
  r.command = j.at("command").get<std::string>();
  r.gen = j.at("gen").get<std::string>();
  if (!j.at("alpha").is_null()) r.alpha = j.at("alpha").get<double>();
  r.c = j.at("c").get<double>();
  r.scaling = j.at("scaling").get<std::string>();
  r.measure = j.at("measure").get<std::string>();
  r.functional = j.at("functional").get<std::string>();
  r.p = j.at("p").get<std::string>();
  r.q = j.at("q").get<std::string>();
  r.window = pair(j.at("window"));
  r.rel_tol = j.at("rel_tol").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.out = j.at("out").get<std::string>();
  r.cost = j.at("cost").get<std::string>();
  r.n = j.at("n").get<int>();
  r.trials = j.at("trials").get<int>();
  r.model = j.at("model").get<std::string>();
  r.bracket = pair(j.at("bracket"));
  r.prior = j.at("prior").get<double>();
  r.chi = j.at("chi").get<double>();
  r.m1 = j.at("m1").get<double>();
  r.m2 = j.at("m2").get<double>();
  r.m3 = j.at("m3").get<double>();
  return r;
}

// "lo:hi"
inline std::pair<double, double> parse_range(const std::string& s, const std::string& what) {
  auto k = s.find(':');
  if (k == std::string::npos) throw ConfigError(what + " must look like lo:hi");
  double lo = bsdiv::detail::parse_double(s.substr(0, k), what), hi = bsdiv::detail::parse_double(s.substr(k + 1), what);
  if (!(lo < hi)) throw ConfigError(what + " needs lo < hi");
  return {lo, hi};
}

inline Generator resolve_generator(const RunConfig& r) {
  if (r.gen == "power") {
    if (!r.alpha) throw ConfigError("--gen power needs --alpha");
    return Generator::power(*r.alpha);
  }
  if (r.alpha) throw ConfigError("--alpha only applies to --gen power");
  return Generator::from_id(r.gen);
}

struct Issue {
  enum class Level { error, warning } level;
  std::string message;
};

namespace detail {
inline bool has_zero(const Distribution& d, const std::vector<double>& pts) {
  if (!d.is_discrete()) return false;
  auto dd = d.to_discrete();
  return std::any_of(pts.begin(), pts.end(), [&](double x) { return dd.pmf(x) == 0.0; });
}
}  // namespace detail

// Checks a configuration before running it. Errors stop the run; warnings are reported.
inline std::vector<Issue> validate(const RunConfig& r) {
  std::vector<Issue> out;
  auto err = [&](std::string m) { out.push_back({Issue::Level::error, std::move(m)}); };
  auto warn = [&](std::string m) { out.push_back({Issue::Level::warning, std::move(m)}); };
  static const std::vector<std::string> commands = {"div", "gof", "mde", "ot-verify", "dep", "cpd", "bayes", "dual"};
  if (std::find(commands.begin(), commands.end(), r.command) == commands.end()) err("unknown command '" + r.command + "'");
  std::optional<Generator> g;
  try {
    g = resolve_generator(r);
  } catch (const ConfigError& e) {
    err(e.what());
  }
  if (!(r.c >= 0.0 && r.c <= 1.0)) err("--c must lie in [0, 1]");
  if (!(r.rel_tol > 0.0)) err("--rel-tol must be > 0");
  auto needs_input = [&](const std::string& spec, const char* flag) {
    if (spec.empty()) {
      err(std::string(flag) + " is required");
      return;
    }
    if (spec.find(':') == std::string::npos && !std::filesystem::exists(spec))
      err(std::string(flag) + ": no such file '" + spec + "'");
  };
  if (r.command == "div" || r.command == "cpd" || r.command == "bayes" || r.command == "dual" || r.command == "gof") {
    needs_input(r.p, "--p");
    needs_input(r.q, "--q");
  }
  if (r.command == "mde" || r.command == "dep") needs_input(r.p, "--p");
  if (r.command == "cpd" && !r.window) err("cpd needs --window lo:hi");

  // Power generators and zero-bearing pmfs: the divergence degenerates to infinity.
  if (g && g->kind() == GeneratorKind::power && r.command == "div" && r.scaling == "q") {
    try {
      auto p = io::load_distribution(r.p), q = io::load_distribution(r.q);
      if (p.is_discrete() && q.is_discrete()) {
        auto u = union_support(p.to_discrete(), q.to_discrete()).points();
        if (g->alpha() <= 0.0 && detail::has_zero(p, u))
          warn("alpha <= 0 with zeros in S(P): every such point makes the divergence infinite");
        if (g->alpha() >= 1.0 && detail::has_zero(q, u))
          warn("alpha >= 1 with zeros in S(Q): every such point makes the divergence infinite");
      }
    } catch (const ConfigError& e) {
      err(e.what());
    }
  }
  return out;
}

struct Report {
  json body;
  int exit_code = 0;
};

inline json ext(ExtendedReal v) {
  if (v.is_finite()) return v.value() == 0.0 ? 0.0 : v.value();
  return v.str();
}

namespace detail {

inline AggregationMeasure resolve_measure(const RunConfig& r, const Distribution& p, const Distribution& q) {
  const std::string& m = r.measure;
  if (m.empty() || m == "counting") {
    if (!p.is_discrete() || !q.is_discrete())
      throw ConfigError("counting measure needs discrete inputs; pass --measure lebesgue:lo:hi:panels");
    return union_support(p.to_discrete(), q.to_discrete());
  }
  if (m.rfind("lebesgue:", 0) == 0) {
    std::string rest = m.substr(9);
    auto k1 = rest.find(':'), k2 = rest.find(':', k1 + 1);
    if (k1 == std::string::npos || k2 == std::string::npos) throw ConfigError("measure must look like lebesgue:lo:hi:panels");
    double lo = bsdiv::detail::parse_double(rest.substr(0, k1), "measure");
    double hi = bsdiv::detail::parse_double(rest.substr(k1 + 1, k2 - k1 - 1), "measure");
    int panels = static_cast<int>(bsdiv::detail::parse_double(rest.substr(k2 + 1), "measure"));
    return AggregationMeasure::lebesgue(lo, hi, panels);
  }
  if (m.rfind("weighted:", 0) == 0) return AggregationMeasure::weighted(io::load_distribution(m.substr(9)));
  throw ConfigError("unknown measure '" + m + "'");
}

inline ScalingRegime resolve_scaling(const RunConfig& r) {
  if (r.scaling == "unit") return UnitScaling{};
  if (r.scaling == "q") return QScaling{};
  if (r.scaling.rfind("adaptive:", 0) == 0) return AdaptiveScaling{WeightConnector::parse(r.scaling.substr(9)), nullptr};
  if (r.scaling == "explicit") {
    double m1 = r.m1, m2 = r.m2, m3 = r.m3;
    return ExplicitScaling{[m1](double) { return m1; }, [m2](double) { return m2; }, [m3](double) { return m3; }};
  }
  throw ConfigError("unknown scaling '" + r.scaling + "'");
}

inline FunctionalKind resolve_functional(const std::string& f) {
  if (f == "pmf") return FunctionalKind::pmf;
  if (f == "density") return FunctionalKind::density;
  if (f == "cdf") return FunctionalKind::cdf;
  if (f == "survival") return FunctionalKind::survival;
  if (f == "quantile") return FunctionalKind::quantile;
  if (f == "centered-rank") return FunctionalKind::centered_rank;
  throw ConfigError("unknown functional '" + f + "'");
}

inline json breakdown(const DivergenceResult& d) {
  return json{{"interior", ext(d.interior)}, {"p_mass", ext(d.p_only)}, {"q_mass", ext(d.q_only)},
              {"correction", ext(d.correction)}};
}

inline json no_breakdown() {
  return json{{"interior", nullptr}, {"p_mass", nullptr}, {"q_mass", nullptr}, {"correction", nullptr}};
}

struct Outcome {
  ExtendedReal value;
  json breakdown = no_breakdown();
  std::size_t nodes = 0;
  int panels = 0;
  std::vector<std::string> warnings;
  json details = json::object();
};

inline Outcome run_div(const RunConfig& r) {
  Generator g = resolve_generator(r);
  Distribution p = io::load_distribution(r.p), q = io::load_distribution(r.q);
  AggregationMeasure m = resolve_measure(r, p, q);
  FunctionalKind fk = resolve_functional(r.functional);
  StatFunctional sp = functional_of(fk, p), sq = functional_of(fk, q);
  ScalingRegime sc = resolve_scaling(r);
  bool casm = r.scaling == "q" && g.in_closed_domain(0.0) && !std::isfinite(g.hi());
  auto eval = [&](const AggregationMeasure& mm) {
    return casm ? casm_divergence(g, r.c, nullptr, mm, sp, sq) : bs_divergence({g, r.c, sc, mm, sp, sq});
  };
  DivergenceResult d = eval(m);
  Outcome o;
  if (m.is_quadrature()) {
    bool converged = false;
    for (int k = 0; k < 10 && !converged; ++k) {
      m = m.with_panels(m.panels() * 2);
      DivergenceResult next = eval(m);
      if (next.value.is_finite() && d.value.is_finite()) {
        double scale = std::max(std::abs(next.value.value()), 1e-300);
        converged = std::abs(next.value.value() - d.value.value()) <= r.rel_tol * scale;
      } else {
        converged = next.value == d.value;
      }
      d = next;
    }
    if (!converged) o.warnings.push_back("quadrature did not reach --rel-tol");
  }
  o.value = d.value;
  o.breakdown = breakdown(d);
  o.nodes = d.diagnostics.nodes;
  o.panels = m.panels();
  o.warnings.insert(o.warnings.end(), d.diagnostics.warnings.begin(), d.diagnostics.warnings.end());
  return o;
}

inline Outcome run_gof(const RunConfig& r) {
  Distribution model = io::load_distribution(r.q);
  auto samples = io::read_samples(r.p);
  WeightConnector w = WeightConnector::named(ConnectorKind::one);
  if (r.scaling.rfind("adaptive:", 0) == 0)
    w = WeightConnector::parse(r.scaling.substr(9));
  else if (r.scaling != "unit")
    throw ConfigError("gof takes --scaling unit or adaptive:<w-id>");
  Outcome o;
  o.value = weighted_edf_statistic(samples, model, w);
  o.nodes = samples.size();
  o.details = json{{"statistic", w.kind() == ConnectorKind::one ? "cramer-von-mises" : "weighted-edf:" + w.id()},
                   {"n", samples.size()}};
  return o;
}

inline Outcome run_mde(const RunConfig& r) {
  Distribution data = io::load_distribution(r.p);
  ParametricModel model;
  std::string fam = r.model.empty() ? "bern" : r.model;
  if (fam == "bern") {
    model = {[](double t) { return NamedFamily::bernoulli(t); }, 0.0, 1.0, FunctionalKind::pmf};
  } else if (fam == "exp") {
    model = {[](double t) { return NamedFamily::exponential(t); }, 0.05, 20.0, resolve_functional(r.functional)};
  } else if (fam.rfind("norm-mean:", 0) == 0) {
    double sd = bsdiv::detail::parse_double(fam.substr(10), "model");
    model = {[sd](double t) { return NamedFamily::normal(t, sd); }, -10.0, 10.0, resolve_functional(r.functional)};
  } else {
    throw ConfigError("unknown model '" + fam + "' (bern, exp, norm-mean:<sigma>)");
  }
  if (r.bracket) std::tie(model.theta_lo, model.theta_hi) = *r.bracket;
  DivergenceTemplate tpl{resolve_generator(r), r.c, resolve_scaling(r), std::nullopt};
  if (model.functional != FunctionalKind::pmf) {
    auto any = model.family(0.5 * (model.theta_lo + model.theta_hi));
    tpl.measure = resolve_measure(r, any, data);
  }
  auto res = min_divergence_estimate(model, tpl, data);
  Outcome o;
  o.value = res.min_value;
  o.nodes = res.trace.size();
  o.details = json{{"theta_hat", res.theta_hat}, {"evaluations", res.trace.size()}};
  return o;
}

inline Outcome run_ot(const RunConfig& r) {
  PointwiseCost cost = PointwiseCost::parse(r.cost);
  if (r.n < 1 || r.n > 10) throw ConfigError("--n must lie in [1, 10]");
  std::mt19937_64 rng(r.seed);
  std::uniform_real_distribution<double> U(0.1, 5.0);
  std::uniform_int_distribution<int> N(1, r.n);
  double max_gap = 0.0;
  bool antitone = true;
  for (int t = 0; t < r.trials; ++t) {
    int n = N(rng);
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n), 1.0 / n);
    for (auto& x : a) x = U(rng);
    for (auto& x : b) x = U(rng);
    DiscreteDistribution p(a, w), q(b, w);
    auto cert = transport_certificate(cost, p, q);
    max_gap = std::max(max_gap, cert.gap);
    antitone = antitone && cert.quasi_antitone;
  }
  Outcome o;
  o.value = max_gap;
  o.details = json{{"trials", r.trials}, {"all_match", max_gap <= 1e-12}, {"quasi_antitone_all", antitone}};
  return o;
}

inline Outcome run_dep(const RunConfig& r) {
  Generator g = resolve_generator(r);
  Outcome o;
  if (r.functional == "copula") {
    auto grid = CopulaGrid::from_matrix(io::read_matrix(r.p));
    o.value = copula_phi_dependence(g, grid);
    o.nodes = grid.n() * grid.n();
    return o;
  }
  JointDiscrete j = io::read_joint(r.p);
  o.nodes = j.n_rows() * j.n_cols();
  if (r.functional == "cdf-l2" || r.functional == "cdf-tv") {
    o.value = cdf_dependence(j, r.functional == "cdf-l2" ? CdfDependenceMode::l2 : CdfDependenceMode::tv);
    return o;
  }
  auto d = phi_dependence(g, j, r.c);
  o.value = d.value;
  o.breakdown = breakdown(d);
  return o;
}

inline Outcome run_cpd(const RunConfig& r) {
  Generator g = resolve_generator(r);
  Distribution p = io::load_distribution(r.p), q = io::load_distribution(r.q);
  bsdiv::detail::require_phi_one_zero(g);
  auto [lo, hi] = *r.window;
  auto res = refine_until(AggregationMeasure::lebesgue(lo, hi, 64), [&](double z) {
    double fp = std::clamp(p.cdf(z), 0.0, 1.0), fq = std::clamp(q.cdf(z), 0.0, 1.0);
    return perspective(g, 1.0 - fp, 1.0 - fq) + perspective(g, fp, fq);
  }, r.rel_tol, 10);
  Outcome o;
  o.value = res.value;
  o.panels = res.panels;
  o.nodes = static_cast<std::size_t>(res.panels) * 16;
  o.warnings = cpd_window_warnings(p, q, lo, hi);
  if (!res.converged) o.warnings.push_back("quadrature did not reach --rel-tol");
  return o;
}

inline Outcome run_bayes(const RunConfig& r) {
  DecisionProblem d{r.prior, io::load_distribution(r.p).to_discrete(), io::load_distribution(r.q).to_discrete()};
  auto b = power_bound_sandwich(d, r.chi);
  Outcome o;
  o.value = statistical_information(d);
  o.details = json{{"prior_risk", prior_bayes_risk(d)}, {"posterior_risk", b.risk}, {"lower_bound", b.lower},
                   {"upper_bound", b.upper}, {"power_divergence", b.divergence}, {"bounds_hold", b.holds}};
  return o;
}

inline Outcome run_dual(const RunConfig& r) {
  Generator g = resolve_generator(r);
  auto p = io::load_distribution(r.p).to_discrete(), q = io::load_distribution(r.q).to_discrete();
  auto rep = verify_attainment(g, q, p, r.trials, static_cast<unsigned>(r.seed));
  Outcome o;
  o.value = rep.divergence;
  o.nodes = p.size();
  o.details = json{{"dual_at_optimum", ext(rep.dual_at_optimum)}, {"gap", rep.gap}, {"attained", rep.attained},
                   {"max_perturbed_excess", rep.max_excess}, {"weak_duality", rep.weak_duality}};
  return o;
}

}  // namespace detail

// Runs one command. Configuration errors exit with 2, numeric failures with 3.
inline Report run(const RunConfig& r) {
  Report rep;
  json body{{"command", r.command}, {"config_echo", to_json(r)}};
  auto fail = [&](int code, const std::string& kind, const std::string& msg) {
    body["value"] = nullptr;
    body["breakdown"] = detail::no_breakdown();
    body["diagnostics"] = json{{"nodes", 0}, {"panels", 0}, {"warnings", json::array()}};
    body["error"] = json{{"kind", kind}, {"message", msg}};
    rep.exit_code = code;
  };
  try {
    std::vector<std::string> warnings;
    for (auto& i : validate(r)) {
      if (i.level == Issue::Level::error) throw ConfigError(i.message);
      warnings.push_back(i.message);
    }
    detail::Outcome o;
    if (r.command == "div") o = detail::run_div(r);
    else if (r.command == "gof") o = detail::run_gof(r);
    else if (r.command == "mde") o = detail::run_mde(r);
    else if (r.command == "ot-verify") o = detail::run_ot(r);
    else if (r.command == "dep") o = detail::run_dep(r);
    else if (r.command == "cpd") o = detail::run_cpd(r);
    else if (r.command == "bayes") o = detail::run_bayes(r);
    else o = detail::run_dual(r);
    warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
    body["value"] = ext(o.value);
    body["breakdown"] = o.breakdown;
    body["diagnostics"] = json{{"nodes", o.nodes}, {"panels", o.panels}, {"warnings", warnings}};
    if (!o.details.empty()) body["details"] = o.details;
  } catch (const ConfigError& e) {
    fail(2, "config", e.what());
  } catch (const NumericError& e) {
    fail(3, "numeric", e.what());
  }
  body["provenance"] = json{{"version", kVersion}, {"seed", r.seed}};
  rep.body = std::move(body);
  return rep;
}

}  // namespace bsdiv::cli
