#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "errors.hpp"
#include "extended.hpp"
#include "generator.hpp"

namespace bsdiv {

// Finitely supported law on the real line. Support strictly increasing.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  DiscreteDistribution(std::vector<double> support, std::vector<double> weights) {
    if (support.size() != weights.size() || support.empty())
      throw ConfigError("support and weights must be non-empty and of equal length");
    std::vector<std::size_t> idx(support.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return support[a] < support[b]; });
    double total = 0.0;
    for (auto i : idx) {
      if (!std::isfinite(support[i])) throw ConfigError("support values must be finite");
      if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw ConfigError("weights must be finite and >= 0");
      if (!support_.empty() && support_.back() == support[i]) throw ConfigError("support values must be distinct");
      support_.push_back(support[i]);
      weights_.push_back(weights[i]);
      total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("weights sum to " + ExtendedReal(total).str() + ", not 1");
    double run = 0.0;
    for (double w : weights_) cumulative_.push_back(run += w);
    cumulative_.back() = 1.0;
  }

  // Empirical law of the sample; cumulative levels are exact multiples of 1/N.
  static DiscreteDistribution empirical(std::vector<double> samples) {
    if (samples.empty()) throw ConfigError("empty sample");
    std::sort(samples.begin(), samples.end());
    DiscreteDistribution d;
    const double n = static_cast<double>(samples.size());
    std::size_t i = 0;
    while (i < samples.size()) {
      if (!std::isfinite(samples[i])) throw ConfigError("samples must be finite");
      std::size_t j = i;
      while (j < samples.size() && samples[j] == samples[i]) ++j;
      d.support_.push_back(samples[i]);
      d.weights_.push_back(static_cast<double>(j - i) / n);
      d.cumulative_.push_back(static_cast<double>(j) / n);
      i = j;
    }
    return d;
  }

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  std::size_t size() const { return support_.size(); }

  double pmf(double x) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.end() || *it != x) return 0.0;
    return weights_[static_cast<std::size_t>(it - support_.begin())];
  }

  double cdf(double x) const {
    auto k = static_cast<std::size_t>(std::upper_bound(support_.begin(), support_.end(), x) - support_.begin());
    return k == 0 ? 0.0 : cumulative_[k - 1];
  }

  // inf{z : F(z) >= u}
  double quantile(double u) const {
    if (u > 1.0 || std::isnan(u)) throw DomainError("quantile level outside (0, 1]");
    if (u <= 0.0) return -kInfinity;
    auto k = static_cast<std::size_t>(std::lower_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    return support_[std::min(k, support_.size() - 1)];
  }

  ExtendedReal mgf(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weights_[i] * std::exp(x * support_[i]);
    return s;
  }

 private:
  std::vector<double> support_, weights_, cumulative_;
};

enum class FamilyKind { exponential, uniform, normal, bernoulli };

// Closed-form parametric laws: "exp:<rate>", "unif:<lo>:<hi>", "norm:<mu>:<sigma>", "bern:<theta>".
class NamedFamily {
 public:
  static NamedFamily exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("exponential rate must be > 0");
    return NamedFamily(FamilyKind::exponential, rate, 0.0);
  }
  static NamedFamily uniform(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("uniform needs lo < hi");
    return NamedFamily(FamilyKind::uniform, lo, hi);
  }
  static NamedFamily normal(double mu, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma)) throw ConfigError("normal sigma must be > 0");
    return NamedFamily(FamilyKind::normal, mu, sigma);
  }
  static NamedFamily bernoulli(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("bernoulli theta must lie in [0, 1]");
    return NamedFamily(FamilyKind::bernoulli, theta, 0.0);
  }

  static NamedFamily parse(std::string_view spec) {
    std::vector<double> v;
    auto colon = spec.find(':');
    std::string head(spec.substr(0, colon));
    while (colon != std::string_view::npos) {
      auto next = spec.find(':', colon + 1);
      v.push_back(detail::parse_double(spec.substr(colon + 1, next == std::string_view::npos ? next : next - colon - 1),
                                       "family spec"));
      colon = next;
    }
    auto need = [&](std::size_t n) {
      if (v.size() != n) throw ConfigError("family '" + head + "' expects " + std::to_string(n) + " parameter(s)");
    };
    if (head == "exp") return need(1), exponential(v[0]);
    if (head == "unif") return need(2), uniform(v[0], v[1]);
    if (head == "norm") return need(2), normal(v[0], v[1]);
    if (head == "bern") return need(1), bernoulli(v[0]);
    throw ConfigError("unknown family '" + std::string(spec) + "'");
  }

  FamilyKind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  bool is_discrete() const { return kind_ == FamilyKind::bernoulli; }

  std::string id() const {
    switch (kind_) {
      case FamilyKind::exponential: return "exp:" + detail::fmt_g(a_);
      case FamilyKind::uniform: return "unif:" + detail::fmt_g(a_) + ":" + detail::fmt_g(b_);
      case FamilyKind::normal: return "norm:" + detail::fmt_g(a_) + ":" + detail::fmt_g(b_);
      case FamilyKind::bernoulli: return "bern:" + detail::fmt_g(a_);
    }
    return "";
  }

  double support_lo() const {
    switch (kind_) {
      case FamilyKind::exponential: case FamilyKind::bernoulli: return 0.0;
      case FamilyKind::uniform: return a_;
      case FamilyKind::normal: return -kInfinity;
    }
    return 0.0;
  }
  double support_hi() const {
    switch (kind_) {
      case FamilyKind::exponential: case FamilyKind::normal: return kInfinity;
      case FamilyKind::uniform: return b_;
      case FamilyKind::bernoulli: return 1.0;
    }
    return 0.0;
  }

  double cdf(double x) const {
    switch (kind_) {
      case FamilyKind::exponential: return x <= 0.0 ? 0.0 : -std::expm1(-a_ * x);
      case FamilyKind::uniform: return x <= a_ ? 0.0 : x >= b_ ? 1.0 : (x - a_) / (b_ - a_);
      case FamilyKind::normal: return 0.5 * std::erfc(-(x - a_) / (b_ * std::sqrt(2.0)));
      case FamilyKind::bernoulli: return x < 0.0 ? 0.0 : x < 1.0 ? 1.0 - a_ : 1.0;
    }
    return 0.0;
  }

  double survival(double x) const {
    switch (kind_) {
      case FamilyKind::exponential: return x <= 0.0 ? 1.0 : std::exp(-a_ * x);
      case FamilyKind::normal: return 0.5 * std::erfc((x - a_) / (b_ * std::sqrt(2.0)));
      default: return 1.0 - cdf(x);
    }
  }

  // Lebesgue density, or the pmf for Bernoulli.
  double pdf(double x) const {
    switch (kind_) {
      case FamilyKind::exponential: return x < 0.0 ? 0.0 : a_ * std::exp(-a_ * x);
      case FamilyKind::uniform: return (x < a_ || x > b_) ? 0.0 : 1.0 / (b_ - a_);
      case FamilyKind::normal: {
        double z = (x - a_) / b_;
        return std::exp(-0.5 * z * z) / (b_ * std::sqrt(2.0 * M_PI));
      }
      case FamilyKind::bernoulli: return x == 0.0 ? 1.0 - a_ : x == 1.0 ? a_ : 0.0;
    }
    return 0.0;
  }

  double quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("quantile level outside [0, 1]");
    switch (kind_) {
      case FamilyKind::exponential: return u >= 1.0 ? kInfinity : -std::log1p(-u) / a_;
      case FamilyKind::uniform: return a_ + u * (b_ - a_);
      case FamilyKind::normal:
        if (u <= 0.0) return -kInfinity;
        if (u >= 1.0) return kInfinity;
        return a_ - b_ * std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
      case FamilyKind::bernoulli: return u <= 0.0 ? -kInfinity : u <= 1.0 - a_ ? 0.0 : 1.0;
    }
    return 0.0;
  }

  ExtendedReal mgf(double x) const {
    switch (kind_) {
      case FamilyKind::exponential: return x < a_ ? ExtendedReal(a_ / (a_ - x)) : ExtendedReal::infinity();
      case FamilyKind::uniform:
        if (x == 0.0) return 1.0;
        return (std::exp(x * b_) - std::exp(x * a_)) / (x * (b_ - a_));
      case FamilyKind::normal: return std::exp(a_ * x + 0.5 * b_ * b_ * x * x);
      case FamilyKind::bernoulli: return 1.0 - a_ + a_ * std::exp(x);
    }
    return 0.0;
  }

  // Interval holding all but 1e-10 of the mass.
  std::pair<double, double> default_window() const {
    if (kind_ == FamilyKind::bernoulli || kind_ == FamilyKind::uniform) return {support_lo(), support_hi()};
    double lo = std::max(support_lo(), quantile(5e-11));
    return {lo, quantile(1.0 - 5e-11)};
  }

  DiscreteDistribution as_discrete() const {
    if (!is_discrete()) throw ConfigError("family " + id() + " is not discrete");
    return DiscreteDistribution({0.0, 1.0}, {1.0 - a_, a_});
  }

 private:
  NamedFamily(FamilyKind k, double a, double b) : kind_(k), a_(a), b_(b) {}
  FamilyKind kind_;
  double a_, b_;
};

// Either a finite pmf or a named family.
class Distribution {
 public:
  Distribution(DiscreteDistribution d) : v_(std::move(d)) {}  // NOLINT
  Distribution(NamedFamily f) : v_(std::move(f)) {}           // NOLINT

  bool is_discrete() const {
    return std::holds_alternative<DiscreteDistribution>(v_) || std::get<NamedFamily>(v_).is_discrete();
  }
  const DiscreteDistribution* discrete() const { return std::get_if<DiscreteDistribution>(&v_); }
  const NamedFamily* family() const { return std::get_if<NamedFamily>(&v_); }

  // Finite pmf view; Bernoulli families are converted.
  DiscreteDistribution to_discrete() const {
    if (auto d = discrete()) return *d;
    return family()->as_discrete();
  }

  double cdf(double x) const { return std::visit([x](const auto& d) { return d.cdf(x); }, v_); }
  double quantile(double u) const { return std::visit([u](const auto& d) { return d.quantile(u); }, v_); }
  ExtendedReal mgf(double x) const { return std::visit([x](const auto& d) { return d.mgf(x); }, v_); }
  double mass_or_density(double x) const {
    if (auto d = discrete()) return d->pmf(x);
    return family()->pdf(x);
  }

 private:
  std::variant<DiscreteDistribution, NamedFamily> v_;
};

}  // namespace bsdiv
