#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "distribution.hpp"
#include "errors.hpp"
#include "extended.hpp"

namespace bsdiv {

enum class FunctionalKind {
  pmf, density, cdf, survival, quantile, centered_rank, mgf, integrated, hazard,
  residual_survival, residual_density, past_density, order_statistic_density, quantile_density, custom
};

// Interval of admissible indices x.
struct IndexDomain {
  double lo = -kInfinity, hi = kInfinity;
  bool lo_open = false, hi_open = false;
  bool contains(double x) const {
    if (x < lo || x > hi) return false;
    if (x == lo && lo_open) return false;
    if (x == hi && hi_open) return false;
    return true;
  }
};

// x -> S_x(P) for a fixed source law.
class StatFunctional {
 public:
  using Eval = std::function<ExtendedReal(double)>;

  static StatFunctional custom(Eval f, IndexDomain domain = {}, double range_lo = -kInfinity,
                               double range_hi = kInfinity, FunctionalKind kind = FunctionalKind::custom) {
    if (!f) throw ConfigError("custom functional needs an evaluator");
    StatFunctional s;
    s.kind_ = kind;
    s.eval_ = std::move(f);
    s.domain_ = domain;
    s.range_lo_ = range_lo;
    s.range_hi_ = range_hi;
    return s;
  }

  static StatFunctional pmf(const DiscreteDistribution& d) {
    auto s = custom([d](double x) { return ExtendedReal(d.pmf(x)); }, {}, 0.0, 1.0, FunctionalKind::pmf);
    s.source_ = Distribution(d);
    return s;
  }

  // Lebesgue density for continuous families, pmf for discrete ones.
  static StatFunctional density(const Distribution& d) {
    if (d.is_discrete()) return pmf(d.to_discrete());
    NamedFamily f = *d.family();
    auto s = custom([f](double x) { return ExtendedReal(f.pdf(x)); }, {}, 0.0, kInfinity, FunctionalKind::density);
    s.source_ = d;
    return s;
  }

  static StatFunctional cdf(const Distribution& d) {
    auto s = custom([d](double x) { return ExtendedReal(d.cdf(x)); }, {}, 0.0, 1.0, FunctionalKind::cdf);
    s.source_ = d;
    return s;
  }

  static StatFunctional survival(const Distribution& d) {
    auto s = custom(
        [d](double x) {
          if (auto f = d.family()) return ExtendedReal(f->survival(x));
          return ExtendedReal(1.0 - d.cdf(x));
        },
        {}, 0.0, 1.0, FunctionalKind::survival);
    s.source_ = d;
    return s;
  }

  static StatFunctional quantile(const Distribution& d) {
    auto s = custom([d](double u) { return ExtendedReal(d.quantile(u)); }, {0.0, 1.0, true, true}, -kInfinity,
                    kInfinity, FunctionalKind::quantile);
    s.source_ = d;
    return s;
  }

  static StatFunctional centered_rank(const Distribution& d) {
    auto s = custom([d](double x) { return ExtendedReal(2.0 * d.cdf(x) - 1.0); }, {}, -1.0, 1.0,
                    FunctionalKind::centered_rank);
    s.source_ = d;
    return s;
  }

  // Closed forms; +inf where the transform diverges.
  static StatFunctional mgf(const Distribution& d) {
    auto s = custom([d](double x) { return d.mgf(x); }, {}, 0.0, kInfinity, FunctionalKind::mgf);
    s.source_ = d;
    return s;
  }

  // f / (1 - F); a positive density over zero survival gives +inf.
  static StatFunctional hazard(const NamedFamily& f) {
    require_continuous(f);
    auto s = custom(
        [f](double x) {
          double dens = f.pdf(x), surv = f.survival(x);
          if (surv > 0.0) return ExtendedReal(dens / surv);
          return dens > 0.0 ? ExtendedReal::infinity() : ExtendedReal(0.0);
        },
        {}, 0.0, kInfinity, FunctionalKind::hazard);
    s.source_ = Distribution(f);
    return s;
  }

  static StatFunctional residual_survival(const Distribution& d, double t0) {
    double base = 1.0 - d.cdf(t0);
    if (auto f = d.family()) base = f->survival(t0);
    if (!(base > 0.0)) throw ConfigError("residual transform needs positive survival at t0");
    auto s = custom(
        [d, base](double x) {
          double sx = d.family() ? d.family()->survival(x) : 1.0 - d.cdf(x);
          return ExtendedReal(sx / base);
        },
        {t0, kInfinity, true, false}, 0.0, 1.0, FunctionalKind::residual_survival);
    s.source_ = d;
    return s;
  }

  static StatFunctional residual_density(const NamedFamily& f, double t0) {
    require_continuous(f);
    double base = f.survival(t0);
    if (!(base > 0.0)) throw ConfigError("residual transform needs positive survival at t0");
    auto s = custom([f, base](double x) { return ExtendedReal(f.pdf(x) / base); }, {t0, kInfinity, true, false},
                    0.0, kInfinity, FunctionalKind::residual_density);
    s.source_ = Distribution(f);
    return s;
  }

  static StatFunctional past_density(const NamedFamily& f, double t0) {
    require_continuous(f);
    double base = f.cdf(t0);
    if (!(base > 0.0)) throw ConfigError("past transform needs positive cdf at t0");
    auto s = custom([f, base](double x) { return ExtendedReal(f.pdf(x) / base); }, {-kInfinity, t0, false, false},
                    0.0, kInfinity, FunctionalKind::past_density);
    s.source_ = Distribution(f);
    return s;
  }

  // Density of the k-th of N order statistics.
  static StatFunctional order_statistic_density(const NamedFamily& f, int k, int n) {
    require_continuous(f);
    if (!(k >= 1 && k <= n)) throw ConfigError("order statistic needs 1 <= k <= N");
    double logc = std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0) - std::lgamma(static_cast<double>(k));
    auto s = custom(
        [f, k, n, logc](double x) {
          double F = f.cdf(x);
          return ExtendedReal(std::exp(logc) * f.pdf(x) * std::pow(F, k - 1) * std::pow(1.0 - F, n - k));
        },
        {}, 0.0, kInfinity, FunctionalKind::order_statistic_density);
    s.source_ = Distribution(f);
    return s;
  }

  // d/du of the quantile function, by central differences.
  static StatFunctional quantile_density(const Distribution& d) {
    auto s = custom(
        [d](double u) {
          double h = std::min({1e-5, 0.5 * u, 0.5 * (1.0 - u)});
          return ExtendedReal((d.quantile(u + h) - d.quantile(u - h)) / (2.0 * h));
        },
        {0.0, 1.0, true, true}, 0.0, kInfinity, FunctionalKind::quantile_density);
    s.source_ = d;
    return s;
  }

  ExtendedReal operator()(double x) const {
    if (!domain_.contains(x)) throw DomainError("index " + ExtendedReal(x).str() + " outside functional domain");
    return eval_(x);
  }

  FunctionalKind kind() const { return kind_; }
  const IndexDomain& domain() const { return domain_; }
  double range_lo() const { return range_lo_; }
  double range_hi() const { return range_hi_; }
  const std::optional<Distribution>& source() const { return source_; }

 private:
  static void require_continuous(const NamedFamily& f) {
    if (f.is_discrete()) throw ConfigError("transform needs a continuous family, got " + f.id());
  }

  FunctionalKind kind_ = FunctionalKind::custom;
  Eval eval_;
  IndexDomain domain_;
  double range_lo_ = -kInfinity, range_hi_ = kInfinity;
  std::optional<Distribution> source_;
};

}  // namespace bsdiv
