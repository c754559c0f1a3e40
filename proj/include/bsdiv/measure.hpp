#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "errors.hpp"
#include "extended.hpp"
#include "functional.hpp"

namespace bsdiv {

struct QuadratureRule {
  std::vector<double> x, w;  // on [-1, 1]
};

// Gauss-Legendre rules for 4..64 nodes, computed once by Newton iteration.
inline const QuadratureRule& gauss_legendre(int n) {
  if (n < 4 || n > 64) throw ConfigError("nodes per panel must lie in [4, 64]");
  static const auto rules = [] {
    std::array<QuadratureRule, 65> r;
    for (int m = 4; m <= 64; ++m) {
      auto& q = r[static_cast<std::size_t>(m)];
      q.x.resize(static_cast<std::size_t>(m));
      q.w.resize(static_cast<std::size_t>(m));
      for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (m + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
          double p0 = 1.0, p1 = 0.0;
          for (int j = 1; j <= m; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
          }
          dp = m * (z * p0 - p1) / (z * z - 1.0);
          double dz = p0 / dp;
          z -= dz;
          if (std::abs(dz) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(m - 1 - i);
        q.x[lo] = -z;
        q.x[hi] = z;
        q.w[lo] = q.w[hi] = w;
      }
    }
    return r;
  }();
  return rules[static_cast<std::size_t>(n)];
}

enum class MeasureKind { counting, lebesgue, weighted };

struct MeasureNode {
  double x, w;
};

// Counting measure on a finite set, composite Gauss-Legendre on a window, or a
// probability law (exact for pmfs, density-weighted quadrature otherwise).
class AggregationMeasure {
 public:
  static AggregationMeasure counting(std::vector<double> points) {
    if (points.empty()) throw ConfigError("counting measure needs at least one point");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    AggregationMeasure m(MeasureKind::counting);
    m.points_ = std::move(points);
    return m;
  }

  static AggregationMeasure lebesgue(double lo, double hi, int panels = 64, int nodes_per_panel = 16) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("quadrature window needs finite lo < hi");
    if (panels < 1) throw ConfigError("panel count must be >= 1");
    gauss_legendre(nodes_per_panel);
    AggregationMeasure m(MeasureKind::lebesgue);
    m.lo_ = lo;
    m.hi_ = hi;
    m.panels_ = panels;
    m.npp_ = nodes_per_panel;
    return m;
  }

  static AggregationMeasure weighted(const Distribution& d, int panels = 64, int nodes_per_panel = 16) {
    AggregationMeasure m(MeasureKind::weighted);
    if (d.is_discrete()) {
      auto dd = d.to_discrete();
      m.points_ = dd.support();
      m.point_w_ = dd.weights();
    } else {
      auto [lo, hi] = d.family()->default_window();
      gauss_legendre(nodes_per_panel);
      m.lo_ = lo;
      m.hi_ = hi;
      m.panels_ = panels;
      m.npp_ = nodes_per_panel;
    }
    m.base_ = d;
    return m;
  }

  MeasureKind kind() const { return kind_; }
  bool is_quadrature() const { return panels_ > 0; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int panels() const { return panels_; }
  int nodes_per_panel() const { return npp_; }
  const std::vector<double>& points() const { return points_; }

  AggregationMeasure with_panels(int panels) const {
    if (!is_quadrature()) throw ConfigError("only quadrature measures can be refined");
    AggregationMeasure m = *this;
    m.panels_ = panels;
    return m;
  }

  // Restriction to (-inf, x]; quadrature windows keep their panel density.
  std::optional<AggregationMeasure> restricted_to(double x) const {
    AggregationMeasure m = *this;
    if (!is_quadrature()) {
      m.points_.clear();
      m.point_w_.clear();
      for (std::size_t i = 0; i < points_.size() && points_[i] <= x; ++i) {
        m.points_.push_back(points_[i]);
        if (!point_w_.empty()) m.point_w_.push_back(point_w_[i]);
      }
      if (m.points_.empty()) return std::nullopt;
      return m;
    }
    if (x <= lo_) return std::nullopt;
    if (x >= hi_) return m;
    m.hi_ = x;
    m.panels_ = std::max(1, static_cast<int>(std::ceil(panels_ * (x - lo_) / (hi_ - lo_))));
    return m;
  }

  // Nodes in deterministic ascending order.
  std::vector<MeasureNode> nodes() const {
    std::vector<MeasureNode> out;
    if (!is_quadrature()) {
      out.reserve(points_.size());
      for (std::size_t i = 0; i < points_.size(); ++i)
        out.push_back({points_[i], point_w_.empty() ? 1.0 : point_w_[i]});
      return out;
    }
    const auto& rule = gauss_legendre(npp_);
    const double h = (hi_ - lo_) / panels_;
    out.reserve(static_cast<std::size_t>(panels_) * rule.x.size());
    for (int p = 0; p < panels_; ++p) {
      double a = lo_ + p * h, b = p + 1 == panels_ ? hi_ : lo_ + (p + 1) * h;
      double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        double x = mid + half * rule.x[i];
        double w = half * rule.w[i];
        if (base_) w *= base_->mass_or_density(x);
        out.push_back({x, w});
      }
    }
    return out;
  }

  std::size_t node_count() const {
    return is_quadrature() ? static_cast<std::size_t>(panels_) * static_cast<std::size_t>(npp_) : points_.size();
  }

 private:
  explicit AggregationMeasure(MeasureKind k) : kind_(k) {}
  MeasureKind kind_;
  std::vector<double> points_, point_w_;
  double lo_ = 0.0, hi_ = 0.0;
  int panels_ = 0, npp_ = 0;
  std::optional<Distribution> base_;
};

using Integrand = std::function<ExtendedReal(double)>;

namespace detail {
template <class E>
[[noreturn]] inline void rethrow_at(const E& e, double x) {
  throw E(std::string(e.what()) + " (at node x=" + ExtendedReal(x).str() + ")");
}
}  // namespace detail

// Sum of w_i f(x_i) over the nodes, in node order. Any failing node is reported by position.
inline ExtendedReal integrate(const AggregationMeasure& m, const Integrand& f) {
  ExtendedReal total = 0.0;
  for (const auto& n : m.nodes()) {
    ExtendedReal v;
    try {
      v = f(n.x);
    } catch (const DomainError& e) {
      detail::rethrow_at(e, n.x);
    } catch (const ConfigError& e) {
      detail::rethrow_at(e, n.x);
    } catch (const NumericError& e) {
      detail::rethrow_at(e, n.x);
    }
    total += ExtendedReal(n.w) * v;
  }
  return total;
}

struct RefineResult {
  ExtendedReal value;
  double achieved_delta = 0.0;
  int panels = 0;
  bool converged = false;
};

// Doubles the panel count until successive estimates agree to rel_tol.
inline RefineResult refine_until(const AggregationMeasure& m, const Integrand& f, double rel_tol,
                                 int max_doublings = 14) {
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be > 0");
  RefineResult r;
  r.value = integrate(m, f);
  if (!m.is_quadrature()) {
    r.converged = true;
    return r;
  }
  r.panels = m.panels();
  for (int k = 0; k < max_doublings; ++k) {
    AggregationMeasure next = m.with_panels(r.panels * 2);
    ExtendedReal v = integrate(next, f);
    r.panels *= 2;
    if (!v.is_finite() || !r.value.is_finite()) {
      bool same = v == r.value;
      r.value = v;
      r.achieved_delta = same ? 0.0 : kInfinity;
      if (same) {
        r.converged = true;
        return r;
      }
      continue;
    }
    double diff = std::abs(v.value() - r.value.value());
    double scale = std::abs(v.value());
    r.achieved_delta = diff == 0.0 ? 0.0 : diff / (scale > 0.0 ? scale : 1.0);
    r.value = v;
    if (r.achieved_delta < rel_tol) {
      r.converged = true;
      return r;
    }
  }
  return r;
}

// x -> integral of the base functional over (-inf, x] under the measure.
inline StatFunctional integrated_functional(const StatFunctional& base, const AggregationMeasure& m) {
  return StatFunctional::custom(
      [base, m](double x) {
        auto sub = m.restricted_to(x);
        if (!sub) return ExtendedReal(0.0);
        return integrate(*sub, [&base](double z) { return base(z); });
      },
      {}, -kInfinity, kInfinity, FunctionalKind::integrated);
}

}  // namespace bsdiv
