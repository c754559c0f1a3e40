#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "distribution.hpp"
#include "errors.hpp"
#include "extended.hpp"
#include "functional.hpp"
#include "generator.hpp"
#include "measure.hpp"

namespace bsdiv {

using PointMap = std::function<double(double)>;

enum class ConnectorKind { one, v_one_minus_v, one_minus_v, one_minus_v_sq, one_minus_v_pow, v, v_pow, v_two_minus_v, custom };

// w(u, v) for adaptive scaling. The named forms depend on v only.
class WeightConnector {
 public:
  using Fn = std::function<double(double, double)>;

  static WeightConnector named(ConnectorKind k, double beta = 1.0) {
    if (k == ConnectorKind::custom) throw ConfigError("use WeightConnector::custom for custom connectors");
    if ((k == ConnectorKind::one_minus_v_pow || k == ConnectorKind::v_pow) && !(beta > 0.0))
      throw ConfigError("connector exponent must be > 0");
    WeightConnector w;
    w.kind_ = k;
    w.beta_ = beta;
    return w;
  }
  static WeightConnector custom(Fn f) {
    if (!f) throw ConfigError("custom connector needs a function");
    WeightConnector w;
    w.kind_ = ConnectorKind::custom;
    w.fn_ = std::move(f);
    return w;
  }

  // "one", "ad", "1-v", "1-v2", "upow:<b>", "v", "pow:<b>", "v(2-v)".
  static WeightConnector parse(std::string_view id) {
    if (id == "one") return named(ConnectorKind::one);
    if (id == "ad" || id == "v(1-v)") return named(ConnectorKind::v_one_minus_v);
    if (id == "1-v") return named(ConnectorKind::one_minus_v);
    if (id == "1-v2") return named(ConnectorKind::one_minus_v_sq);
    if (id == "v") return named(ConnectorKind::v);
    if (id == "v(2-v)") return named(ConnectorKind::v_two_minus_v);
    if (id.rfind("upow:", 0) == 0)
      return named(ConnectorKind::one_minus_v_pow, detail::parse_double(id.substr(5), "connector id"));
    if (id.rfind("pow:", 0) == 0) return named(ConnectorKind::v_pow, detail::parse_double(id.substr(4), "connector id"));
    throw ConfigError("unknown connector id '" + std::string(id) + "'");
  }

  std::string id() const {
    switch (kind_) {
      case ConnectorKind::one: return "one";
      case ConnectorKind::v_one_minus_v: return "ad";
      case ConnectorKind::one_minus_v: return "1-v";
      case ConnectorKind::one_minus_v_sq: return "1-v2";
      case ConnectorKind::one_minus_v_pow: return "upow:" + detail::fmt_g(beta_);
      case ConnectorKind::v: return "v";
      case ConnectorKind::v_pow: return "pow:" + detail::fmt_g(beta_);
      case ConnectorKind::v_two_minus_v: return "v(2-v)";
      case ConnectorKind::custom: return "custom";
    }
    return "custom";
  }

  ConnectorKind kind() const { return kind_; }
  double beta() const { return beta_; }

  double operator()(double u, double v) const {
    switch (kind_) {
      case ConnectorKind::one: return 1.0;
      case ConnectorKind::v_one_minus_v: return v * (1.0 - v);
      case ConnectorKind::one_minus_v: return 1.0 - v;
      case ConnectorKind::one_minus_v_sq: return 1.0 - v * v;
      case ConnectorKind::one_minus_v_pow: return std::pow(1.0 - v, beta_);
      case ConnectorKind::v: return v;
      case ConnectorKind::v_pow: return std::pow(v, beta_);
      case ConnectorKind::v_two_minus_v: return v * (2.0 - v);
      case ConnectorKind::custom: return fn_(u, v);
    }
    return 1.0;
  }

 private:
  ConnectorKind kind_ = ConnectorKind::one;
  double beta_ = 1.0;
  Fn fn_;
};

// m1 = m2 = 1, m3 = r
struct UnitScaling {
  PointMap r;
};
// m1 = m2 = S(Q), m3 = r S(Q)
struct QScaling {
  PointMap r;
};
// m1 = m2 = w(S(P), S(Q)), m3 = r w
struct AdaptiveScaling {
  WeightConnector w;
  PointMap r;
};
struct ExplicitScaling {
  PointMap m1, m2, m3;
};
using ScalingRegime = std::variant<UnitScaling, QScaling, AdaptiveScaling, ExplicitScaling>;

struct DivergenceConfig {
  Generator generator;
  double selector = 0.5;
  ScalingRegime scaling = UnitScaling{};
  AggregationMeasure measure;
  StatFunctional functional_p;
  StatFunctional functional_q;
};

struct Diagnostics {
  std::size_t nodes = 0;
  int panels = 0;
  std::vector<std::string> warnings;
};

// value = interior + p_only + q_only + correction
struct DivergenceResult {
  ExtendedReal value, interior, p_only, q_only, correction;
  Diagnostics diagnostics;
};

namespace detail {

inline double eval_map(const PointMap& f, double x) { return f ? f(x) : 1.0; }

inline double finite_value(const StatFunctional& s, double x, const char* which) {
  ExtendedReal v = s(x);
  if (!v.is_finite()) throw NumericError(std::string("functional ") + which + " is infinite at x=" + ExtendedReal(x).str());
  return v.value();
}

// Conditions under which D = 0 would not force S(P) = S(Q) at this node.
inline void reflexivity_checks(const Generator& g, double c, ExtendedReal s, ExtendedReal t, std::set<std::string>& out) {
  if (s == t || !s.is_finite() || !t.is_finite()) return;
  double sv = s.value(), tv = t.value();
  if (!g.in_open_domain(sv) || !g.in_open_domain(tv)) return;
  if (!g.strictly_convex_at(tv)) out.insert("generator is not strictly convex at t=" + t.str() + "; zero divergence does not identify the functionals");
  bool kink = g.right_derivative(tv) != g.left_derivative(tv);
  if (kink && (c == 0.0 || c == 1.0)) out.insert("selector c must lie strictly inside (0, 1) at a kink of the generator");
  if (!kink && g.affine_between(sv, tv)) out.insert("generator is affine between scaled arguments; zero divergence does not identify the functionals");
}

// lim_{m -> 0} m psi(u/m, 1) = u (phi*(0) - phi'_c(1)) for u > 0.
inline ExtendedReal recession_at_one(const Generator& g, double c, double u) {
  if (u == 0.0) return 0.0;
  if (u < 0.0) throw DomainError("negative functional value under q-scaling");
  return ExtendedReal(u) * (g.star_at_zero() - ExtendedReal(g.subderivative(1.0, c)));
}

}  // namespace detail

// D = integral of psi(S(P)/m1, S(Q)/m2) m3 over the aggregation measure.
inline DivergenceResult bs_divergence(const DivergenceConfig& cfg) {
  const Generator& g = cfg.generator;
  const double c = cfg.selector;
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("selector c must lie in [0, 1]");
  DivergenceResult res;
  res.correction = 0.0;
  std::set<std::string> warnings;

  auto nodes = cfg.measure.nodes();
  for (const auto& n : nodes) {
    const double x = n.x;
    ExtendedReal contrib;
    double sp = 0.0, sq = 0.0;
    try {
      sp = detail::finite_value(cfg.functional_p, x, "S(P)");
      sq = detail::finite_value(cfg.functional_q, x, "S(Q)");
      std::visit(
          [&](const auto& sc) {
            using T = std::decay_t<decltype(sc)>;
            if constexpr (std::is_same_v<T, UnitScaling>) {
              detail::reflexivity_checks(g, c, sp, sq, warnings);
              contrib = ExtendedReal(detail::eval_map(sc.r, x)) * g.psi(ExtendedReal(sp), ExtendedReal(sq), c);
            } else if constexpr (std::is_same_v<T, QScaling>) {
              if (sq < 0.0) throw ConfigError("q-scaling needs S(Q) >= 0");
              double r = detail::eval_map(sc.r, x);
              if (sq > 0.0) {
                detail::reflexivity_checks(g, c, sp / sq, 1.0, warnings);
                contrib = ExtendedReal(r * sq) * g.psi(ExtendedReal(sp / sq), ExtendedReal(1.0), c);
              } else {
                contrib = ExtendedReal(r) * detail::recession_at_one(g, c, sp);
              }
            } else if constexpr (std::is_same_v<T, AdaptiveScaling>) {
              double m = sc.w(sp, sq);
              if (m < 0.0 || std::isnan(m)) throw ConfigError("connector returned a negative value");
              if (m == 0.0) {
                if (sp != sq) throw ConfigError("connector vanished where S(P) != S(Q)");
                contrib = 0.0;
              } else {
                detail::reflexivity_checks(g, c, sp / m, sq / m, warnings);
                contrib = ExtendedReal(detail::eval_map(sc.r, x) * m) * g.psi(ExtendedReal(sp / m), ExtendedReal(sq / m), c);
              }
            } else {
              auto s = scaled_ratio(sp, detail::eval_map(sc.m1, x));
              auto t = scaled_ratio(sq, detail::eval_map(sc.m2, x));
              if (s && t) detail::reflexivity_checks(g, c, *s, *t, warnings);
              contrib = ExtendedReal(detail::eval_map(sc.m3, x)) * g.psi_ratio(s, t, c);
            }
          },
          cfg.scaling);
    } catch (const DomainError& e) {
      detail::rethrow_at(e, x);
    } catch (const ConfigError& e) {
      detail::rethrow_at(e, x);
    } catch (const NumericError& e) {
      detail::rethrow_at(e, x);
    }
    ExtendedReal w = ExtendedReal(n.w) * contrib;
    if (sp == 0.0 && sq != 0.0)
      res.q_only += w;
    else if (sq == 0.0 && sp != 0.0)
      res.p_only += w;
    else
      res.interior += w;
  }
  res.value = res.interior + res.p_only + res.q_only;
  res.diagnostics.nodes = nodes.size();
  res.diagnostics.panels = cfg.measure.panels();
  res.diagnostics.warnings.assign(warnings.begin(), warnings.end());
  return res;
}

// Unit-scaled kernel with a differentiable generator.
inline DivergenceResult classical_bregman(const Generator& g, const PointMap& r, const AggregationMeasure& m,
                                          const StatFunctional& sp, const StatFunctional& sq) {
  if (!g.differentiable()) throw ConfigError("classical Bregman distance needs a differentiable generator");
  return bs_divergence({g, 0.5, UnitScaling{r}, m, sp, sq});
}

inline DivergenceResult adaptive_scaled(const Generator& g, double c, const WeightConnector& w, const PointMap& r,
                                        const AggregationMeasure& m, const StatFunctional& sp, const StatFunctional& sq) {
  return bs_divergence({g, c, AdaptiveScaling{w, r}, m, sp, sq});
}

// q-scaled divergence with the zero sets of S(P), S(Q) split out:
// interior  = int r S(Q) phi(S(P)/S(Q)) over {S(P) S(Q) > 0}
// p_only    = phi*(0) int r S(P) over {S(Q) = 0}
// q_only    = phi(0)  int r S(Q) over {S(P) = 0}
// correction = -phi'_c(1) int r (S(P) - S(Q)) - phi(1) int r S(Q)
inline DivergenceResult casm_divergence(const Generator& g, double c, const PointMap& r, const AggregationMeasure& m,
                                        const StatFunctional& fp, const StatFunctional& fq) {
  if (!g.in_closed_domain(0.0) || std::isfinite(g.hi()))
    throw ConfigError("this decomposition needs a generator domain containing [0, inf)");
  ExtendedReal interior = 0.0;
  double pmass = 0.0, qmass = 0.0, ptot = 0.0, qtot = 0.0;
  auto nodes = m.nodes();
  for (const auto& n : nodes) {
    double sp = detail::finite_value(fp, n.x, "S(P)");
    double sq = detail::finite_value(fq, n.x, "S(Q)");
    if (sp < 0.0 || sq < 0.0) throw DomainError("q-scaled divergence needs nonnegative functionals at x=" + ExtendedReal(n.x).str());
    double wr = n.w * detail::eval_map(r, n.x);
    if (sp > 0.0 && sq > 0.0)
      interior += ExtendedReal(wr * sq * g.phi(sp / sq));
    else if (sp > 0.0)
      pmass += wr * sp;
    else if (sq > 0.0)
      qmass += wr * sq;
    ptot += wr * sp;
    qtot += wr * sq;
  }
  DivergenceResult res;
  res.interior = interior;
  res.p_only = ExtendedReal(pmass) * g.star_at_zero();
  res.q_only = ExtendedReal(qmass) * g.phi_bar(0.0);
  res.correction = -(g.subderivative(1.0, c) * (ptot - qtot)) - g.phi(1.0) * qtot;
  res.value = res.interior + res.p_only + res.q_only + res.correction;
  res.diagnostics.nodes = nodes.size();
  res.diagnostics.panels = m.panels();
  return res;
}

// q phi(p/q) with the zero conventions: p = 0 gives q phi(0), q = 0 gives p phi*(0).
inline ExtendedReal perspective(const Generator& g, double p, double q) {
  if (p < 0.0 || q < 0.0) throw DomainError("perspective needs nonnegative arguments");
  if (p > 0.0 && q > 0.0) return ExtendedReal(q) * g.phi_bar(p / q);
  if (q > 0.0) return ExtendedReal(q) * g.phi_bar(0.0);
  if (p > 0.0) return ExtendedReal(p) * g.star_at_zero();
  return 0.0;
}

inline ExtendedReal total_variation_distance(const PointMap& r, const AggregationMeasure& m, const StatFunctional& sp,
                                             const StatFunctional& sq) {
  return integrate(m, [&](double x) {
    return ExtendedReal(detail::eval_map(r, x) *
                        std::abs(detail::finite_value(sp, x, "S(P)") - detail::finite_value(sq, x, "S(Q)")));
  });
}

// Counting measure on the union of the two supports.
inline AggregationMeasure union_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  std::vector<double> pts = p.support();
  pts.insert(pts.end(), q.support().begin(), q.support().end());
  return AggregationMeasure::counting(std::move(pts));
}

inline DivergenceConfig pmf_config(const Generator& g, double c, ScalingRegime sc, const DiscreteDistribution& p,
                                   const DiscreteDistribution& q) {
  return {g, c, std::move(sc), union_support(p, q), StatFunctional::pmf(p), StatFunctional::pmf(q)};
}

// sum over x of q(x) phi(p(x)/q(x)) with the zero-set conventions.
inline DivergenceResult casm_divergence(const Generator& g, const DiscreteDistribution& p, const DiscreteDistribution& q,
                                        double c = 0.5) {
  return casm_divergence(g, c, nullptr, union_support(p, q), StatFunctional::pmf(p), StatFunctional::pmf(q));
}

// Integral over z of the divergence of a z-indexed configuration.
inline ExtendedReal aggregated_divergence(const std::function<DivergenceConfig(double)>& family,
                                          const AggregationMeasure& outer) {
  return integrate(outer, [&](double z) { return bs_divergence(family(z)).value; });
}

// Per z: q-scaled divergence between the two-point laws (1 - F_P(z), F_P(z)) and (1 - F_Q(z), F_Q(z)).
inline ExtendedReal bernoulli_aggregated_divergence(const Generator& g, double c, const PointMap& cdf_p,
                                                    const PointMap& cdf_q, const AggregationMeasure& outer) {
  return aggregated_divergence(
      [&](double z) {
        double fp = std::clamp(cdf_p(z), 0.0, 1.0), fq = std::clamp(cdf_q(z), 0.0, 1.0);
        auto bern = [](double f) {
          return StatFunctional::custom([f](double x) { return ExtendedReal(x == 0.0 ? 1.0 - f : f); });
        };
        return DivergenceConfig{g, c, QScaling{}, AggregationMeasure::counting({0.0, 1.0}), bern(fp), bern(fq)};
      },
      outer);
}

}  // namespace bsdiv
