#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "core.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "generator.hpp"
#include "measure.hpp"

namespace bsdiv {

// Bivariate pmf on a rectangular grid of row and column values.
class JointDiscrete {
 public:
  JointDiscrete(std::vector<double> rows, std::vector<double> cols, std::vector<double> mass)
      : rows_(std::move(rows)), cols_(std::move(cols)), mass_(std::move(mass)) {
    if (rows_.empty() || cols_.empty() || mass_.size() != rows_.size() * cols_.size())
      throw ConfigError("joint pmf needs rows * cols masses");
    if (!std::is_sorted(rows_.begin(), rows_.end()) || !std::is_sorted(cols_.begin(), cols_.end()) ||
        std::adjacent_find(rows_.begin(), rows_.end()) != rows_.end() ||
        std::adjacent_find(cols_.begin(), cols_.end()) != cols_.end())
      throw ConfigError("joint support values must be strictly increasing");
    double s = 0.0;
    for (double m : mass_) {
      if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("joint masses must be finite and >= 0");
      s += m;
    }
    if (std::abs(s - 1.0) > 1e-12) throw ConfigError("joint masses sum to " + ExtendedReal(s).str() + ", not 1");
  }

  // From (row, col, mass) triples; missing cells carry zero mass.
  static JointDiscrete from_triples(const std::vector<std::tuple<double, double, double>>& t) {
    std::vector<double> r, c;
    for (auto& [x, y, m] : t) {
      r.push_back(x);
      c.push_back(y);
    }
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::vector<double> mass(r.size() * c.size(), 0.0);
    for (auto& [x, y, m] : t) {
      auto i = static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), x) - r.begin());
      auto j = static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), y) - c.begin());
      mass[i * c.size() + j] += m;
    }
    return JointDiscrete(std::move(r), std::move(c), std::move(mass));
  }

  std::size_t n_rows() const { return rows_.size(); }
  std::size_t n_cols() const { return cols_.size(); }
  const std::vector<double>& rows() const { return rows_; }
  const std::vector<double>& cols() const { return cols_; }
  double mass(std::size_t i, std::size_t j) const { return mass_[i * cols_.size() + j]; }

  std::vector<double> row_marginal() const {
    std::vector<double> m(rows_.size(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (std::size_t j = 0; j < cols_.size(); ++j) m[i] += mass(i, j);
    return m;
  }
  std::vector<double> col_marginal() const {
    std::vector<double> m(cols_.size(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (std::size_t j = 0; j < cols_.size(); ++j) m[j] += mass(i, j);
    return m;
  }

  // Joint cdf H(x_i, y_j) on the grid.
  std::vector<double> cdf_grid() const {
    std::vector<double> h(mass_.size(), 0.0);
    const std::size_t nc = cols_.size();
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (std::size_t j = 0; j < nc; ++j) {
        double v = mass(i, j);
        if (i > 0) v += h[(i - 1) * nc + j];
        if (j > 0) v += h[i * nc + j - 1];
        if (i > 0 && j > 0) v -= h[(i - 1) * nc + j - 1];
        h[i * nc + j] = v;
      }
    return h;
  }

 private:
  std::vector<double> rows_, cols_, mass_;
};

// q-scaled divergence between the joint and the product of its marginals, over the grid cells.
inline DivergenceResult phi_dependence(const Generator& g, const JointDiscrete& j, double c = 0.5) {
  auto pr = j.row_marginal(), pc = j.col_marginal();
  const std::size_t nc = j.n_cols(), n = j.n_rows() * nc;
  std::vector<double> cells(n);
  std::iota(cells.begin(), cells.end(), 0.0);
  auto cell = [nc](double x) {
    auto k = static_cast<std::size_t>(x);
    return std::pair{k / nc, k % nc};
  };
  auto joint = StatFunctional::custom([&j, cell](double x) {
    auto [a, b] = cell(x);
    return ExtendedReal(j.mass(a, b));
  });
  auto product = StatFunctional::custom([pr, pc, cell](double x) {
    auto [a, b] = cell(x);
    return ExtendedReal(pr[a] * pc[b]);
  });
  return casm_divergence(g, c, nullptr, AggregationMeasure::counting(std::move(cells)), joint, product);
}

inline ExtendedReal mutual_information(const JointDiscrete& j) { return phi_dependence(Generator::kl(), j).value; }

// Copula density sampled at product quadrature nodes on (0, 1)^2.
struct CopulaGrid {
  std::vector<double> nodes, weights;
  std::vector<double> values;  // row-major, values[i * n + j] = c(nodes[i], nodes[j])

  std::size_t n() const { return nodes.size(); }

  static CopulaGrid from_density(const std::function<double(double, double)>& c, int panels = 32,
                                 int nodes_per_panel = 16) {
    CopulaGrid g;
    for (const auto& nd : AggregationMeasure::lebesgue(0.0, 1.0, panels, nodes_per_panel).nodes()) {
      g.nodes.push_back(nd.x);
      g.weights.push_back(nd.w);
    }
    for (double u : g.nodes)
      for (double v : g.nodes) g.values.push_back(c(u, v));
    g.validate();
    return g;
  }

  // Dense n x n matrix of cell-centre values (midpoint rule).
  static CopulaGrid from_matrix(const std::vector<std::vector<double>>& m) {
    CopulaGrid g;
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i].size() != n) throw ConfigError("copula grid must be square");
      g.nodes.push_back((i + 0.5) / static_cast<double>(n));
      g.weights.push_back(1.0 / static_cast<double>(n));
      g.values.insert(g.values.end(), m[i].begin(), m[i].end());
    }
    g.validate();
    return g;
  }

  void validate() const {
    if (nodes.empty()) throw ConfigError("empty copula grid");
    double s = 0.0;
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t j = 0; j < n(); ++j) {
        double v = values[i * n() + j];
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("copula density values must be finite and >= 0");
        s += weights[i] * weights[j] * v;
      }
    if (std::abs(s - 1.0) > 1e-3) throw ConfigError("copula density integrates to " + ExtendedReal(s).str() + ", not 1");
  }
};

// Double integral of phi(c(u, v)) minus phi(1).
inline ExtendedReal copula_phi_dependence(const Generator& g, const CopulaGrid& cg) {
  ExtendedReal s = 0.0;
  for (std::size_t i = 0; i < cg.n(); ++i)
    for (std::size_t j = 0; j < cg.n(); ++j)
      s += ExtendedReal(cg.weights[i] * cg.weights[j]) * g.phi_bar(cg.values[i * cg.n() + j]);
  return s - g.phi(1.0);
}

// q-scaled divergence between two copula densities sampled on the same grid.
inline ExtendedReal copula_divergence(const Generator& g, const CopulaGrid& cp, const CopulaGrid& cq) {
  if (cp.nodes != cq.nodes || cp.weights != cq.weights) throw ConfigError("copula grids must coincide");
  ExtendedReal s = 0.0;
  const double d1 = g.subderivative(1.0, 0.5);
  for (std::size_t i = 0; i < cp.n(); ++i)
    for (std::size_t j = 0; j < cp.n(); ++j) {
      double p = cp.values[i * cp.n() + j], q = cq.values[i * cp.n() + j];
      s += ExtendedReal(cp.weights[i] * cp.weights[j]) *
           (perspective(g, p, q) - ExtendedReal(q * g.phi(1.0) + d1 * (p - q)));
    }
  return s;
}

enum class CdfDependenceMode { l2, tv };

// Integral of (H - F1 F2)^2 or |H - F1 F2| against the product of the marginals.
inline double cdf_dependence(const JointDiscrete& j, CdfDependenceMode mode) {
  auto pr = j.row_marginal(), pc = j.col_marginal();
  auto h = j.cdf_grid();
  std::vector<double> fr(pr.size()), fc(pc.size());
  std::partial_sum(pr.begin(), pr.end(), fr.begin());
  std::partial_sum(pc.begin(), pc.end(), fc.begin());
  double s = 0.0;
  for (std::size_t a = 0; a < pr.size(); ++a)
    for (std::size_t b = 0; b < pc.size(); ++b) {
      double d = h[a * pc.size() + b] - fr[a] * fc[b];
      s += pr[a] * pc[b] * (mode == CdfDependenceMode::l2 ? d * d : std::abs(d));
    }
  return s;
}

// Copula version: integral over the unit square of (C(u, v) - u v)^2 or |C(u, v) - u v|.
inline double copula_cdf_dependence(const std::function<double(double, double)>& copula, CdfDependenceMode mode,
                                    int panels = 64, int nodes_per_panel = 16) {
  auto nodes = AggregationMeasure::lebesgue(0.0, 1.0, panels, nodes_per_panel).nodes();
  double s = 0.0;
  for (const auto& a : nodes)
    for (const auto& b : nodes) {
      double d = copula(a.x, b.x) - a.x * b.x;
      s += a.w * b.w * (mode == CdfDependenceMode::l2 ? d * d : std::abs(d));
    }
  return s;
}

namespace detail {
inline void require_phi_one_zero(const Generator& g) {
  if (std::abs(g.phi(1.0)) > 1e-12) throw ConfigError("this functional needs a generator with phi(1) = 0");
}
}  // namespace detail

// Integral of (1 - F_Q) phi((1 - F_P)/(1 - F_Q)) + F_Q phi(F_P / F_Q) with the zero conventions.
inline ExtendedReal cumulative_paired_divergence(const Generator& g, const PointMap& cdf_p, const PointMap& cdf_q,
                                                 const AggregationMeasure& m) {
  detail::require_phi_one_zero(g);
  return integrate(m, [&](double z) {
    double fp = std::clamp(cdf_p(z), 0.0, 1.0), fq = std::clamp(cdf_q(z), 0.0, 1.0);
    return perspective(g, 1.0 - fp, 1.0 - fq) + perspective(g, fp, fq);
  });
}

// Warns when [lo, hi] misses the central 1 - 2e-6 mass of either law.
inline std::vector<std::string> cpd_window_warnings(const Distribution& p, const Distribution& q, double lo, double hi) {
  std::vector<std::string> w;
  double need_lo = std::min(p.quantile(1e-6), q.quantile(1e-6));
  double need_hi = std::max(p.quantile(1.0 - 1e-6), q.quantile(1.0 - 1e-6));
  if (lo > need_lo || hi < need_hi)
    w.push_back("integration window [" + ExtendedReal(lo).str() + ", " + ExtendedReal(hi).str() +
                "] does not cover [" + ExtendedReal(need_lo).str() + ", " + ExtendedReal(need_hi).str() + "]");
  return w;
}

// Integral of phi(1 - F) + phi(F).
inline ExtendedReal cumulative_phi_entropy(const Generator& g, const PointMap& cdf, const AggregationMeasure& m) {
  detail::require_phi_one_zero(g);
  return integrate(m, [&](double z) {
    double f = std::clamp(cdf(z), 0.0, 1.0);
    return g.phi_bar(1.0 - f) + g.phi_bar(f);
  });
}

}  // namespace bsdiv
