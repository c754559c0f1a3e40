#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "extended.hpp"

namespace bsdiv {

enum class GeneratorKind { power, kl, reverse_kl, squared, squared_full_line, total_variation, custom };

// User-supplied convex map. Missing derivatives are approximated by finite differences.
struct CustomMaps {
  std::function<double(double)> phi;
  std::function<double(double)> right_derivative;
  std::function<double(double)> left_derivative;
  std::function<double(double)> second_derivative;
  bool differentiable = true;
};

// Limits of the generator at the domain ends [a, b].
// tail_at_lo = lim_{t->a} (t phi'(a) - phi(t)); only meaningful when deriv_at_lo is finite.
struct BoundaryProfile {
  ExtendedReal phi_at_lo, phi_at_hi;
  ExtendedReal deriv_at_lo, deriv_at_hi;
  ExtendedReal tail_at_lo, tail_at_hi;
  ExtendedReal star_at_zero;  // lim_{s->inf} phi(s)/s
};

namespace detail {

// Limit of f(x_k) along a geometric sequence, with one Aitken step for slowly
// contracting tails. Sequences still moving by a non-shrinking amount diverge.
inline ExtendedReal sequence_limit(const std::function<double(int)>& f, int kmax) {
  double v0 = f(kmax - 2), v1 = f(kmax - 1), v2 = f(kmax);
  if (std::isnan(v2)) throw NumericError("limit sequence produced NaN");
  if (std::isinf(v2) || std::abs(v2) > 1e300) return v2 > 0 ? ExtendedReal::infinity() : ExtendedReal::neg_infinity();
  double d1 = v1 - v0, d2 = v2 - v1;
  if (std::abs(d2) <= 1e-13 * std::max(1.0, std::abs(v2))) return v2;
  if (d1 != 0.0 && d2 / d1 >= 0.999)
    return d2 > 0 ? ExtendedReal::infinity() : ExtendedReal::neg_infinity();
  if (d1 == 0.0) return v2;
  double r = d2 / d1;
  return v2 + d2 * r / (1.0 - r);
}

inline double clamp_kernel(double v, double scale) {
  if (v >= 0.0) return v;
  if (v >= -1e-12 * std::max(1.0, scale)) return 0.0;
  throw NumericError("kernel evaluated to " + ExtendedReal(v).str() + " < 0");
}

inline double parse_double(std::string_view s, const std::string& ctx) {
  std::string buf(s);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || std::isnan(v))
    throw ConfigError("cannot parse number '" + buf + "' in " + ctx);
  return v;
}

inline std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

class Generator {
 public:
  static Generator power(double alpha) {
    if (!std::isfinite(alpha)) throw ConfigError("power generator needs a finite alpha");
    Generator g(GeneratorKind::power, 0.0, kInfinity);
    g.alpha_ = alpha;
    return g;
  }
  static Generator kl() { return Generator(GeneratorKind::kl, 0.0, kInfinity, 1.0); }
  static Generator reverse_kl() { return Generator(GeneratorKind::reverse_kl, 0.0, kInfinity, 0.0); }
  static Generator squared() { return Generator(GeneratorKind::squared, 0.0, kInfinity, 2.0); }
  static Generator squared_full_line() {
    return Generator(GeneratorKind::squared_full_line, -kInfinity, kInfinity, 2.0);
  }
  static Generator total_variation() { return Generator(GeneratorKind::total_variation, 0.0, kInfinity); }

  // Validates convexity on 1000 seeded triples and strict convexity at 1.
  static Generator custom(double lo, double hi, CustomMaps maps) {
    if (!(lo < 1.0 && 1.0 < hi)) throw ConfigError("custom generator domain must contain 1 in its interior");
    if (!maps.phi) throw ConfigError("custom generator needs phi");
    Generator g(GeneratorKind::custom, lo, hi);
    g.custom_ = std::make_shared<CustomMaps>(std::move(maps));
    g.check_convex();
    return g;
  }

  // "power:<a>", "kl", "rkl", "chi2-pearson", "chi2-neyman", "hellinger", "tv", "squared".
  static Generator from_id(std::string_view id) {
    if (id.rfind("power:", 0) == 0) return power(detail::parse_double(id.substr(6), "generator id"));
    if (id == "kl") return kl();
    if (id == "rkl") return reverse_kl();
    if (id == "chi2-pearson") return power(2.0);
    if (id == "chi2-neyman") return power(-1.0);
    if (id == "hellinger") return power(0.5);
    if (id == "tv") return total_variation();
    if (id == "squared") return squared_full_line();
    throw ConfigError("unknown generator id '" + std::string(id) + "'");
  }

  GeneratorKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool in_open_domain(double t) const { return t > lo_ && t < hi_; }
  bool in_closed_domain(double t) const { return t >= lo_ && t <= hi_; }

  std::string id() const {
    switch (kind_) {
      case GeneratorKind::power: return "power:" + detail::fmt_g(alpha_);
      case GeneratorKind::kl: return "kl";
      case GeneratorKind::reverse_kl: return "rkl";
      case GeneratorKind::squared: return "power:2";
      case GeneratorKind::squared_full_line: return "squared";
      case GeneratorKind::total_variation: return "tv";
      case GeneratorKind::custom: return "custom";
    }
    return "custom";
  }

  bool differentiable() const {
    if (kind_ == GeneratorKind::total_variation) return false;
    if (kind_ == GeneratorKind::custom) return custom_->differentiable;
    return true;
  }

  // phi on the open domain.
  double phi(double t) const {
    require_open(t);
    double u = t - 1.0;
    switch (effective()) {
      case GeneratorKind::kl: return (1.0 + u) * std::log1p(u) - u;
      case GeneratorKind::reverse_kl: return u - std::log1p(u);
      case GeneratorKind::squared:
      case GeneratorKind::squared_full_line: return 0.5 * u * u;
      case GeneratorKind::total_variation: return std::abs(u);
      case GeneratorKind::power:
        return (std::expm1(alpha_ * std::log1p(u)) - alpha_ * u) / (alpha_ * (alpha_ - 1.0));
      case GeneratorKind::custom: return custom_->phi(t);
    }
    return 0.0;
  }

  // phi on the closed domain, boundary values by continuous extension.
  ExtendedReal phi_bar(ExtendedReal t) const {
    double x = t.raw();
    if (x == lo_) return phi_at_lo();
    if (x == hi_) return phi_at_hi();
    return phi(x);
  }

  double right_derivative(double t) const {
    require_open(t);
    switch (effective()) {
      case GeneratorKind::kl: return std::log(t);
      case GeneratorKind::reverse_kl: return 1.0 - 1.0 / t;
      case GeneratorKind::squared:
      case GeneratorKind::squared_full_line: return t - 1.0;
      case GeneratorKind::total_variation: return t >= 1.0 ? 1.0 : -1.0;
      case GeneratorKind::power: return std::expm1((alpha_ - 1.0) * std::log(t)) / (alpha_ - 1.0);
      case GeneratorKind::custom:
        if (custom_->right_derivative) return custom_->right_derivative(t);
        return fd_one_sided(t, +1);
    }
    return 0.0;
  }

  double left_derivative(double t) const {
    require_open(t);
    switch (effective()) {
      case GeneratorKind::total_variation: return t > 1.0 ? 1.0 : -1.0;
      case GeneratorKind::custom:
        if (custom_->left_derivative) return custom_->left_derivative(t);
        if (custom_->differentiable) return right_derivative(t);
        return fd_one_sided(t, -1);
      default: return right_derivative(t);
    }
  }

  // c * phi'_+ + (1 - c) * phi'_-
  double subderivative(double t, double c) const {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("selector c must lie in [0, 1]");
    double r = right_derivative(t);
    double l = left_derivative(t);
    return r == l ? r : c * r + (1.0 - c) * l;
  }

  double second_derivative(double t) const {
    require_open(t);
    switch (effective()) {
      case GeneratorKind::kl: return 1.0 / t;
      case GeneratorKind::reverse_kl: return 1.0 / (t * t);
      case GeneratorKind::squared:
      case GeneratorKind::squared_full_line: return 1.0;
      case GeneratorKind::total_variation:
        throw ConfigError("total-variation generator is not twice differentiable");
      case GeneratorKind::power: return std::pow(t, alpha_ - 2.0);
      case GeneratorKind::custom: {
        if (custom_->second_derivative) return custom_->second_derivative(t);
        double h = 1e-4 * std::max(std::abs(t), 1e-3);
        h = std::min({h, 0.5 * (t - lo_), 0.5 * (hi_ - t)});
        return (phi(t + h) - 2.0 * phi(t) + phi(t - h)) / (h * h);
      }
    }
    return 0.0;
  }

  bool strictly_convex_at(double t) const {
    if (kind_ == GeneratorKind::total_variation) return t == 1.0;
    if (kind_ != GeneratorKind::custom) return true;
    double h = 1e-3 * std::max(1.0, std::abs(t));
    h = std::min({h, 0.5 * (t - lo_), 0.5 * (hi_ - t)});
    double mid = phi(t), avg = 0.5 * (phi(t - h) + phi(t + h));
    return avg - mid > 1e-14 * std::max(1.0, std::abs(mid));
  }

  // phi restricted to the segment between s and t is affine.
  bool affine_between(double s, double t) const {
    if (s == t) return true;
    if (kind_ == GeneratorKind::total_variation) return (s <= 1.0 && t <= 1.0) || (s >= 1.0 && t >= 1.0);
    if (kind_ != GeneratorKind::custom) return false;
    if (!in_open_domain(s) || !in_open_domain(t)) return false;
    double m = 0.5 * (s + t);
    double gap = 0.5 * (phi(s) + phi(t)) - phi(m);
    return gap <= 1e-13 * std::max({1.0, std::abs(phi(s)), std::abs(phi(t))});
  }

  ExtendedReal phi_at_lo() const {
    switch (effective()) {
      case GeneratorKind::kl: return 1.0;
      case GeneratorKind::reverse_kl: return ExtendedReal::infinity();
      case GeneratorKind::squared: return 0.5;
      case GeneratorKind::squared_full_line: return ExtendedReal::infinity();
      case GeneratorKind::total_variation: return 1.0;
      case GeneratorKind::power: return alpha_ > 0.0 ? ExtendedReal(1.0 / alpha_) : ExtendedReal::infinity();
      case GeneratorKind::custom: return numeric_limit_lo([this](double t) { return phi(t); });
    }
    return 0.0;
  }

  ExtendedReal phi_at_hi() const {
    if (kind_ == GeneratorKind::custom) return numeric_limit_hi([this](double t) { return phi(t); });
    return ExtendedReal::infinity();
  }

  ExtendedReal deriv_at_lo() const {
    switch (effective()) {
      case GeneratorKind::kl:
      case GeneratorKind::reverse_kl:
      case GeneratorKind::squared_full_line: return ExtendedReal::neg_infinity();
      case GeneratorKind::squared:
      case GeneratorKind::total_variation: return -1.0;
      case GeneratorKind::power:
        return alpha_ > 1.0 ? ExtendedReal(-1.0 / (alpha_ - 1.0)) : ExtendedReal::neg_infinity();
      case GeneratorKind::custom: return numeric_limit_lo([this](double t) { return right_derivative(t); });
    }
    return 0.0;
  }

  ExtendedReal deriv_at_hi() const {
    switch (effective()) {
      case GeneratorKind::kl:
      case GeneratorKind::squared:
      case GeneratorKind::squared_full_line: return ExtendedReal::infinity();
      case GeneratorKind::reverse_kl:
      case GeneratorKind::total_variation: return 1.0;
      case GeneratorKind::power:
        return alpha_ < 1.0 ? ExtendedReal(1.0 / (1.0 - alpha_)) : ExtendedReal::infinity();
      case GeneratorKind::custom: return numeric_limit_hi([this](double t) { return left_derivative(t); });
    }
    return 0.0;
  }

  // lim_{t->a} (t phi'(a) - phi(t)), requires finite phi'(a).
  ExtendedReal tail_at_lo() const {
    ExtendedReal d = deriv_at_lo();
    if (!d.is_finite()) throw NumericError("tail limit needs a finite derivative at the lower end");
    if (kind_ == GeneratorKind::custom) {
      double dv = d.value();
      return numeric_limit_lo([this, dv](double t) { return t * dv - phi(t); });
    }
    return (-phi_at_lo()) + (d * lo_);
  }

  // lim_{t->b} (t phi'(b) - phi(t)), requires finite phi'(b).
  ExtendedReal tail_at_hi() const {
    ExtendedReal d = deriv_at_hi();
    if (!d.is_finite()) throw NumericError("tail limit needs a finite derivative at the upper end");
    switch (effective()) {
      case GeneratorKind::reverse_kl: return ExtendedReal::infinity();
      case GeneratorKind::total_variation: return 1.0;
      case GeneratorKind::power:
        return alpha_ > 0.0 ? ExtendedReal::infinity() : ExtendedReal(-1.0 / alpha_);
      default: {
        double dv = d.value();
        if (std::isfinite(hi_)) return -phi_at_hi() + ExtendedReal(dv * hi_);
        return numeric_limit_hi([this, dv](double t) { return t * dv - phi(t); });
      }
    }
  }

  // phi*(0) = lim_{t->0} t phi(1/t) = lim_{s->inf} phi(s)/s.
  ExtendedReal star_at_zero() const {
    if (std::isfinite(hi_)) throw ConfigError("star adjoint at 0 needs an unbounded domain");
    return deriv_at_hi();
  }

  // phi*(t) = t phi(1/t).
  ExtendedReal star_adjoint(double t) const {
    if (t < 0.0) throw DomainError("star adjoint defined for t >= 0");
    if (t == 0.0) return star_at_zero();
    return ExtendedReal(t) * phi_bar(1.0 / t);
  }

  BoundaryProfile boundary_profile() const {
    BoundaryProfile b;
    b.phi_at_lo = phi_at_lo();
    b.phi_at_hi = phi_at_hi();
    b.deriv_at_lo = deriv_at_lo();
    b.deriv_at_hi = deriv_at_hi();
    b.tail_at_lo = b.deriv_at_lo.is_finite() ? tail_at_lo() : ExtendedReal::infinity();
    b.tail_at_hi = b.deriv_at_hi.is_finite() ? tail_at_hi() : ExtendedReal::infinity();
    b.star_at_zero = std::isfinite(hi_) ? ExtendedReal::infinity() : star_at_zero();
    return b;
  }

  // Legendre-Fenchel conjugate sup_t (t x - phi(t)).
  ExtendedReal fenchel_conjugate(double x) const {
    switch (effective()) {
      case GeneratorKind::kl: return std::expm1(x);
      case GeneratorKind::reverse_kl:
        return x < 1.0 ? ExtendedReal(-std::log1p(-x)) : ExtendedReal::infinity();
      case GeneratorKind::squared: return x >= -1.0 ? x + 0.5 * x * x : -0.5;
      case GeneratorKind::squared_full_line: return x + 0.5 * x * x;
      case GeneratorKind::total_variation:
        return x <= 1.0 ? ExtendedReal(std::max(x, -1.0)) : ExtendedReal::infinity();
      case GeneratorKind::power: {
        double a = alpha_;
        double s = 1.0 + (a - 1.0) * x;
        if (s > 0.0) return std::expm1(a / (a - 1.0) * std::log(s)) / a;
        if (a > 1.0) return -1.0 / a;
        if (a > 0.0) return ExtendedReal::infinity();
        return s == 0.0 ? ExtendedReal(-1.0 / a) : ExtendedReal::infinity();
      }
      case GeneratorKind::custom: return custom_conjugate(x);
    }
    return 0.0;
  }

  // Extended kernel on [a, b]^2 (infinite ends included when the domain is unbounded).
  ExtendedReal psi(ExtendedReal s_in, ExtendedReal t_in, double c) const {
    double s = s_in.raw(), t = t_in.raw();
    if (!in_closed_domain(s) || !in_closed_domain(t))
      throw DomainError("kernel argument outside generator domain: (" + s_in.str() + ", " + t_in.str() + ")");
    if (s == t) return 0.0;
    const bool s_lo = s == lo_, s_hi = s == hi_, t_lo = t == lo_, t_hi = t == hi_;
    const ExtendedReal inf = ExtendedReal::infinity();

    if (!t_lo && !t_hi) {
      double dt = subderivative(t, c), ft = phi(t);
      if (!s_lo && !s_hi) {
        double lin = dt * (s - t), fs = phi(s);
        return detail::clamp_kernel(fs - ft - lin, std::max({std::abs(fs), std::abs(ft), std::abs(lin)}));
      }
      if (s_lo) {
        if (std::isfinite(lo_)) return clamp_ext(phi_at_lo() - ExtendedReal(ft + dt * (lo_ - t)), std::abs(ft) + 1.0);
        ExtendedReal d = deriv_at_lo();
        if (!d.is_finite() || d.value() < dt) return inf;
        return clamp_ext(-tail_at_lo() - ExtendedReal(ft - dt * t), std::abs(ft) + std::abs(dt * t));
      }
      if (std::isfinite(hi_)) return clamp_ext(phi_at_hi() - ExtendedReal(ft + dt * (hi_ - t)), std::abs(ft) + 1.0);
      ExtendedReal d = deriv_at_hi();
      if (!d.is_finite() || d.value() > dt) return inf;
      return clamp_ext(-tail_at_hi() - ExtendedReal(ft - dt * t), std::abs(ft) + std::abs(dt * t));
    }

    if (t_lo) {
      ExtendedReal d = deriv_at_lo();
      if (!d.is_finite()) return inf;
      double dv = d.value();
      if (!s_hi) {
        double fs = phi(s);
        return clamp_ext(ExtendedReal(fs - dv * s) + tail_at_lo(), std::abs(fs) + std::abs(dv * s));
      }
      if (!std::isfinite(hi_)) return inf;
      return phi_at_hi() - ExtendedReal(dv * hi_) + tail_at_lo();
    }

    ExtendedReal d = deriv_at_hi();
    if (!d.is_finite()) return inf;
    double dv = d.value();
    if (!s_lo) {
      double fs = phi(s);
      return clamp_ext(ExtendedReal(fs - dv * s) + tail_at_hi(), std::abs(fs) + std::abs(dv * s));
    }
    if (!std::isfinite(lo_)) return inf;
    return phi_at_lo() - ExtendedReal(dv * lo_) + tail_at_hi();
  }

  // Kernel on ratios; std::nullopt stands for the indeterminate 0/0.
  ExtendedReal psi_ratio(std::optional<ExtendedReal> s, std::optional<ExtendedReal> t, double c) const {
    if (!s && !t) return 0.0;
    if (!s || !t) throw NumericError("kernel with a single indeterminate 0/0 argument");
    return psi(*s, *t, c);
  }

 private:
  Generator(GeneratorKind k, double lo, double hi, double alpha = 0.0) : kind_(k), lo_(lo), hi_(hi), alpha_(alpha) {}

  GeneratorKind effective() const {
    if (kind_ == GeneratorKind::power) {
      if (alpha_ == 1.0) return GeneratorKind::kl;
      if (alpha_ == 0.0) return GeneratorKind::reverse_kl;
    }
    return kind_;
  }

  void require_open(double t) const {
    if (!in_open_domain(t))
      throw DomainError("generator evaluated outside its open domain at t=" + ExtendedReal(t).str());
  }

  static ExtendedReal clamp_ext(ExtendedReal v, double scale) {
    if (!v.is_finite()) return v;
    return detail::clamp_kernel(v.value(), scale);
  }

  double toward_lo(int k) const {
    return std::isfinite(lo_) ? lo_ + std::ldexp(1.0 - lo_, -k) : -std::ldexp(1.0, k);
  }
  double toward_hi(int k) const {
    return std::isfinite(hi_) ? hi_ - std::ldexp(hi_ - 1.0, -k) : std::ldexp(1.0, k);
  }
  ExtendedReal numeric_limit_lo(const std::function<double(double)>& f) const {
    return detail::sequence_limit([&](int k) { return f(toward_lo(k)); }, 40);
  }
  ExtendedReal numeric_limit_hi(const std::function<double(double)>& f) const {
    return detail::sequence_limit([&](int k) { return f(toward_hi(k)); }, 40);
  }

  double fd_one_sided(double t, int dir) const {
    double h = 1e-5 * std::max(std::abs(t), 1e-300);
    double room = dir > 0 ? hi_ - t : t - lo_;
    h = std::min(h, room / 4.0);
    double f0 = phi(t), f1 = phi(t + dir * h), f2 = phi(t + 2 * dir * h);
    return dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
  }

  // Maximise the concave map t -> t x - phi(t) by bisection on the derivative.
  ExtendedReal custom_conjugate(double x) const {
    ExtendedReal dlo = deriv_at_lo(), dhi = deriv_at_hi();
    if (x >= dhi.raw()) {
      if (!std::isfinite(hi_)) return x > dhi.raw() ? ExtendedReal::infinity() : tail_at_hi();
      return ExtendedReal(x * hi_) - phi_at_hi();
    }
    if (x <= dlo.raw()) {
      if (!std::isfinite(lo_)) return x < dlo.raw() ? ExtendedReal::infinity() : tail_at_lo();
      return ExtendedReal(x * lo_) - phi_at_lo();
    }
    double a = 1.0, b = 1.0;
    while (right_derivative(a) > x) a = std::isfinite(lo_) ? 0.5 * (a + lo_) : 2.0 * a - 1.0 - std::abs(a);
    while (left_derivative(b) < x) b = std::isfinite(hi_) ? 0.5 * (b + hi_) : 2.0 * b;
    for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
      double m = 0.5 * (a + b);
      (right_derivative(m) < x ? a : b) = m;
    }
    double t = 0.5 * (a + b);
    return t * x - phi(t);
  }

  double sample_point(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> U(1e-3, 1.0 - 1e-3);
    double u = U(rng);
    if (std::isfinite(lo_) && std::isfinite(hi_)) return lo_ + u * (hi_ - lo_);
    if (std::isfinite(lo_)) return lo_ + u / (1.0 - u);
    if (std::isfinite(hi_)) return hi_ - (1.0 - u) / u;
    return std::log(u / (1.0 - u));
  }

  void check_convex() const {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> L(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      double x = sample_point(rng), y = sample_point(rng), lam = L(rng);
      double m = lam * x + (1.0 - lam) * y;
      double fx = phi(x), fy = phi(y), fm = phi(m);
      double chord = lam * fx + (1.0 - lam) * fy;
      if (fm > chord + 1e-12 * std::max({1.0, std::abs(fx), std::abs(fy)}))
        throw ConfigError("custom generator is not convex near t=" + ExtendedReal(m).str());
    }
    double h = 1e-3 * std::min({1.0, 1.0 - lo_, hi_ - 1.0});
    double f0 = phi(1.0);
    if (!(0.5 * (phi(1.0 - h) + phi(1.0 + h)) - f0 > 1e-14 * std::max(1.0, std::abs(f0))))
      throw ConfigError("custom generator is not strictly convex at 1");
  }

  GeneratorKind kind_;
  double lo_, hi_;
  double alpha_ = 0.0;
  std::shared_ptr<const CustomMaps> custom_;
};

// Ratio num/den with den >= 0; std::nullopt encodes 0/0.
inline std::optional<ExtendedReal> scaled_ratio(double num, double den) {
  if (den < 0.0 || std::isnan(den)) throw ConfigError("negative scaling value");
  if (den > 0.0) return ExtendedReal(num / den);
  if (num > 0.0) return ExtendedReal::infinity();
  if (num < 0.0) return ExtendedReal::neg_infinity();
  return std::nullopt;
}

// phi(0) + phi*(0): the largest value the scaled divergence can take on the presets.
inline ExtendedReal singular_bound(const Generator& g) { return g.phi_at_lo() + g.star_at_zero(); }

}  // namespace bsdiv
