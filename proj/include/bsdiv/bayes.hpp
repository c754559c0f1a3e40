#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "generator.hpp"
#include "measure.hpp"

namespace bsdiv {

// Binary test of P_H against P_A under 0-1 type losses with costs c_H, c_A.
struct DecisionProblem {
  double prior_h = 0.5;
  DiscreteDistribution p_h, p_a;
  double cost_h = 1.0, cost_a = 1.0;

  double lambda_h() const { return prior_h * cost_h; }
  double lambda_a() const { return (1.0 - prior_h) * cost_a; }

  void validate() const {
    if (!(prior_h >= 0.0 && prior_h <= 1.0)) throw ConfigError("prior must lie in [0, 1]");
    if (!(cost_h > 0.0 && cost_a > 0.0)) throw ConfigError("decision costs must be > 0");
  }
};

inline double prior_bayes_risk(const DecisionProblem& d) {
  d.validate();
  return std::min(d.lambda_h(), d.lambda_a());
}

// Sum over the joint support of min(Lambda_H p_H, Lambda_A p_A).
inline double posterior_bayes_risk(const DecisionProblem& d) {
  d.validate();
  std::vector<double> pts = d.p_h.support();
  pts.insert(pts.end(), d.p_a.support().begin(), d.p_a.support().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double s = 0.0;
  for (double z : pts) s += std::min(d.lambda_h() * d.p_h.pmf(z), d.lambda_a() * d.p_a.pmf(z));
  return s;
}

inline double statistical_information(const DecisionProblem& d) { return prior_bayes_risk(d) - posterior_bayes_risk(d); }

struct AverageInformationCheck {
  double lhs = 0.0;  // integral of I(pi) pi^-3 phi''((1 - pi)/pi) over (0, 1)
  double rhs = 0.0;  // q-scaled divergence of P_H from P_A
  double gap = 0.0;
  bool converged = false;
};

// Average statistical information over the prior, weighted by the curvature of phi.
inline AverageInformationCheck average_information_check(const Generator& g, const DiscreteDistribution& p_h,
                                                         const DiscreteDistribution& p_a, double rel_tol = 1e-9) {
  if (!g.in_open_domain(0.5) || std::isfinite(g.hi()) || g.lo() != 0.0)
    throw ConfigError("average information needs a generator on (0, inf)");
  AverageInformationCheck out;
  auto integrand = [&](double pi) {
    DecisionProblem d{pi, p_h, p_a};
    double info = statistical_information(d);
    if (info == 0.0) return ExtendedReal(0.0);
    return ExtendedReal(info * g.second_derivative((1.0 - pi) / pi) / (pi * pi * pi));
  };
  auto r = refine_until(AggregationMeasure::lebesgue(0.0, 1.0, 16, 16), integrand, rel_tol, 12);
  out.lhs = r.value.value();
  out.converged = r.converged;
  out.rhs = casm_divergence(g, p_h, p_a).value.value();
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

struct SandwichBounds {
  double lower = 0.0, risk = 0.0, upper = 0.0;
  double divergence = 0.0;  // power-chi divergence of P_H from P_A
  bool holds = false;
};

// Power-divergence bounds on the posterior Bayes risk for chi in (0, 1).
inline SandwichBounds power_bound_sandwich(const DecisionProblem& d, double chi) {
  d.validate();
  if (!(chi > 0.0 && chi < 1.0)) throw ConfigError("chi must lie in (0, 1)");
  SandwichBounds b;
  const double lh = d.lambda_h(), la = d.lambda_a();
  b.divergence = casm_divergence(Generator::power(chi), d.p_h, d.p_a).value.value();
  const double base = 1.0 - chi * (1.0 - chi) * b.divergence;
  const double r1 = chi / (1.0 - chi), r2 = (1.0 - chi) / chi;
  b.upper = std::pow(lh, chi) * std::pow(la, 1.0 - chi) * base;
  b.lower = std::pow(lh, std::max(1.0, r1)) * std::pow(la, std::max(1.0, r2)) / std::pow(lh + la, std::max(r1, r2)) *
            std::pow(std::max(base, 0.0), std::max(1.0 / chi, 1.0 / (1.0 - chi)));
  b.risk = posterior_bayes_risk(d);
  const double tol = 1e-12;
  b.holds = b.lower <= b.risk + tol && b.risk <= b.upper + tol;
  return b;
}

}  // namespace bsdiv
