#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "core.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "functional.hpp"
#include "measure.hpp"

namespace bsdiv {

// theta -> Q_theta over a closed bracket.
struct ParametricModel {
  std::function<NamedFamily(double)> family;
  double theta_lo = 0.0, theta_hi = 1.0;
  FunctionalKind functional = FunctionalKind::pmf;
};

// Everything of a DivergenceConfig except the two functionals.
// Without a measure, pmf fits aggregate over the union of both supports.
struct DivergenceTemplate {
  Generator generator;
  double selector = 0.5;
  ScalingRegime scaling = QScaling{};
  std::optional<AggregationMeasure> measure;
};

struct MdeResult {
  double theta_hat = 0.0;
  ExtendedReal min_value;
  std::vector<std::pair<double, ExtendedReal>> trace;
};

inline StatFunctional functional_of(FunctionalKind kind, const Distribution& d) {
  switch (kind) {
    case FunctionalKind::pmf: return StatFunctional::pmf(d.to_discrete());
    case FunctionalKind::density: return StatFunctional::density(d);
    case FunctionalKind::cdf: return StatFunctional::cdf(d);
    case FunctionalKind::survival: return StatFunctional::survival(d);
    case FunctionalKind::quantile: return StatFunctional::quantile(d);
    case FunctionalKind::centered_rank: return StatFunctional::centered_rank(d);
    default: throw ConfigError("functional kind not supported for estimation");
  }
}

// Divergence D(Q_theta, data) at one parameter value.
inline ExtendedReal mde_objective(const ParametricModel& model, const DivergenceTemplate& tpl,
                                  const Distribution& data, double theta) {
  Distribution q = model.family(theta);
  AggregationMeasure m = [&] {
    if (tpl.measure) return *tpl.measure;
    if (model.functional != FunctionalKind::pmf) throw ConfigError("non-pmf fits need an explicit aggregation measure");
    return union_support(q.to_discrete(), data.to_discrete());
  }();
  return bs_divergence({tpl.generator, tpl.selector, tpl.scaling, m, functional_of(model.functional, q),
                        functional_of(model.functional, data)})
      .value;
}

// 32-point grid over the bracket, golden-section refinement of each grid local minimum to |dtheta| < 1e-8.
inline MdeResult min_divergence_estimate(const ParametricModel& model, const DivergenceTemplate& tpl,
                                         const Distribution& data) {
  if (!(model.theta_lo < model.theta_hi)) throw ConfigError("parameter bracket needs lo < hi");
  MdeResult res;
  auto f = [&](double th) {
    ExtendedReal v = mde_objective(model, tpl, data, th);
    res.trace.emplace_back(th, v);
    return v;
  };
  constexpr int kGrid = 32;
  std::vector<double> th(kGrid);
  std::vector<ExtendedReal> val(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    th[i] = model.theta_lo + (model.theta_hi - model.theta_lo) * i / (kGrid - 1);
    val[i] = f(th[i]);
  }
  std::vector<int> starts;
  for (int i = 0; i < kGrid; ++i) {
    if (!val[i].is_finite()) continue;
    bool left = i == 0 || val[i] <= val[i - 1];
    bool right = i == kGrid - 1 || val[i] <= val[i + 1];
    if (left && right) starts.push_back(i);
  }
  if (starts.empty())
    throw NumericError("divergence is infinite over the whole parameter bracket; no minimum-divergence estimate exists");
  std::sort(starts.begin(), starts.end(), [&](int a, int b) { return val[a] < val[b]; });
  if (starts.size() > 4) starts.resize(4);

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  res.min_value = ExtendedReal::infinity();
  for (int i : starts) {
    double a = th[std::max(i - 1, 0)], b = th[std::min(i + 1, kGrid - 1)];
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    ExtendedReal fc = f(c), fd = f(d);
    while (b - a >= 1e-8) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = f(d);
      }
    }
    double t = 0.5 * (a + b);
    ExtendedReal v = f(t);
    if (val[i] < v) {
      t = th[i];
      v = val[i];
    }
    if (v < res.min_value) {
      res.min_value = v;
      res.theta_hat = t;
    }
  }
  return res;
}

// Smallest achievable divergence; near zero when the model fits.
inline ExtendedReal model_adequacy(const MdeResult& r) { return r.min_value; }

namespace detail {

// integral over v in [lo, hi] of k * y^e, where y = off + sgn * v.
inline ExtendedReal power_piece(double k, double off, double sgn, double e, double lo, double hi) {
  if (k == 0.0 || lo >= hi) return 0.0;
  double y1 = off + sgn * lo, y2 = off + sgn * hi;
  double ya = std::min(y1, y2), yb = std::max(y1, y2);
  double val;
  if (e == -1.0) {
    if (ya <= 0.0) return k > 0.0 ? ExtendedReal::infinity() : ExtendedReal::neg_infinity();
    val = std::log(yb / ya);
  } else if (e + 1.0 < 0.0 && ya <= 0.0) {
    return k > 0.0 ? ExtendedReal::infinity() : ExtendedReal::neg_infinity();
  } else {
    val = (std::pow(yb, e + 1.0) - std::pow(ya, e + 1.0)) / (e + 1.0);
  }
  return k * val;
}

// Exact integral of (a - v)^2 / w(v) over [lo, hi] for the named connectors.
inline ExtendedReal edf_segment(const WeightConnector& w, double a, double lo, double hi) {
  if (lo >= hi) return 0.0;
  const double b = a - 1.0;
  ExtendedReal s = 0.0;
  auto add = [&](double k, double off, double sgn, double e) { s += power_piece(k, off, sgn, e, lo, hi); };
  switch (w.kind()) {
    case ConnectorKind::one: add(a * a, 0, 1, 0); add(-2 * a, 0, 1, 1); add(1, 0, 1, 2); break;
    case ConnectorKind::v: add(a * a, 0, 1, -1); add(-2 * a, 0, 1, 0); add(1, 0, 1, 1); break;
    case ConnectorKind::v_pow: {
      double be = w.beta();
      add(a * a, 0, 1, -be); add(-2 * a, 0, 1, 1 - be); add(1, 0, 1, 2 - be);
      break;
    }
    case ConnectorKind::one_minus_v: add(b * b, 1, -1, -1); add(2 * b, 1, -1, 0); add(1, 1, -1, 1); break;
    case ConnectorKind::one_minus_v_pow: {
      double be = w.beta();
      add(b * b, 1, -1, -be); add(2 * b, 1, -1, 1 - be); add(1, 1, -1, 2 - be);
      break;
    }
    case ConnectorKind::v_one_minus_v: add(-1, 0, 1, 0); add(a * a, 0, 1, -1); add(b * b, 1, -1, -1); break;
    case ConnectorKind::one_minus_v_sq:
      add(-1, 0, 1, 0); add(b * b / 2, 1, -1, -1); add((1 + a) * (1 + a) / 2, 1, 1, -1);
      break;
    case ConnectorKind::v_two_minus_v:
      add(-1, 0, 1, 0); add(a * a / 2, 0, 1, -1); add((2 - a) * (2 - a) / 2, 2, -1, -1);
      break;
    case ConnectorKind::custom: throw ConfigError("no closed form for a custom connector");
  }
  return s;
}

// Composite Gauss-Legendre on a segment, for custom connectors or non-constant r.
inline ExtendedReal edf_segment_quadrature(const std::function<double(double)>& f, double lo, double hi) {
  if (lo >= hi) return 0.0;
  const auto& rule = gauss_legendre(32);
  constexpr int kPieces = 16;
  double total = 0.0, h = (hi - lo) / kPieces;
  for (int p = 0; p < kPieces; ++p) {
    double mid = lo + (p + 0.5) * h;
    for (std::size_t i = 0; i < rule.x.size(); ++i) total += 0.5 * h * rule.w[i] * f(mid + 0.5 * h * rule.x[i]);
  }
  return total;
}

}  // namespace detail

// N * integral of r (F_emp - F_Q)^2 / w(F_emp, F_Q) dQ, integrated exactly in u = F_Q(x).
// A null r means r = 1; otherwise r is evaluated at F_Q^{-1}(u) and the segments use quadrature.
inline ExtendedReal weighted_edf_statistic(const std::vector<double>& samples, const Distribution& model,
                                           const WeightConnector& w, const PointMap& r = nullptr) {
  if (samples.empty()) throw ConfigError("empty sample");
  if (model.is_discrete()) throw ConfigError("EDF statistics need a continuous model");
  const double n = static_cast<double>(samples.size());
  std::vector<double> u;
  u.reserve(samples.size());
  for (double x : samples) u.push_back(model.cdf(x));
  std::sort(u.begin(), u.end());
  ExtendedReal total = 0.0;
  double prev = 0.0;
  std::size_t i = 0;
  while (true) {
    double next = i < u.size() ? u[i] : 1.0;
    double a = static_cast<double>(i) / n;
    if (!r && w.kind() != ConnectorKind::custom) {
      total += detail::edf_segment(w, a, prev, next);
    } else {
      total += detail::edf_segment_quadrature(
          [&](double v) {
            double wv = w(a, v);
            double rv = r ? r(model.quantile(v)) : 1.0;
            return rv * (a - v) * (a - v) / wv;
          },
          prev, next);
    }
    if (i == u.size()) break;
    std::size_t j = i;
    while (j < u.size() && u[j] == u[i]) ++j;
    prev = next;
    i = j;
  }
  return ExtendedReal(n) * total;
}

inline ExtendedReal cvm_statistic(const std::vector<double>& samples, const Distribution& model,
                                  const PointMap& r = nullptr) {
  return weighted_edf_statistic(samples, model, WeightConnector::named(ConnectorKind::one), r);
}

inline ExtendedReal anderson_darling_statistic(const std::vector<double>& samples, const Distribution& model) {
  return weighted_edf_statistic(samples, model, WeightConnector::named(ConnectorKind::v_one_minus_v));
}

}  // namespace bsdiv
