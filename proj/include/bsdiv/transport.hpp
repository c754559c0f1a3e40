#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "generator.hpp"
#include "measure.hpp"

namespace bsdiv {

enum class CostScale { one, second_arg };

// (u, v) -> W(u, v) psi(u / W, v / W), or a user-supplied map.
class PointwiseCost {
 public:
  static PointwiseCost from_generator(Generator g, double c, CostScale scale) {
    PointwiseCost k;
    k.name_ = g.id() + (scale == CostScale::one ? "/unit" : "/casm");
    k.fn_ = [g = std::move(g), c, scale](double u, double v) {
      if (scale == CostScale::one) return g.psi(u, v, c).value();
      if (!(v > 0.0)) throw DomainError("CASM cost needs a positive second argument");
      return (ExtendedReal(v) * g.psi(u / v, 1.0, c)).value();
    };
    return k;
  }
  static PointwiseCost custom(std::function<double(double, double)> f, std::string name) {
    if (!f) throw ConfigError("custom cost needs a function");
    PointwiseCost k;
    k.fn_ = std::move(f);
    k.name_ = std::move(name);
    return k;
  }
  // "squared", "abs", "kl", "power:<a>" (the last two in CASM form).
  static PointwiseCost parse(const std::string& id) {
    if (id == "squared") return from_generator(Generator::squared_full_line(), 0.5, CostScale::one);
    if (id == "abs") return custom([](double u, double v) { return std::abs(u - v); }, "abs");
    if (id == "tv") return from_generator(Generator::total_variation(), 0.5, CostScale::second_arg);
    return from_generator(Generator::from_id(id), 0.5, CostScale::second_arg);
  }

  double operator()(double u, double v) const { return fn_(u, v); }
  const std::string& name() const { return name_; }

 private:
  std::function<double(double, double)> fn_;
  std::string name_;
};

struct QuasiAntitoneReport {
  bool holds = true;
  double u1 = 0, u2 = 0, v1 = 0, v2 = 0;
  double excess = 0.0;  // lhs - rhs of the worst violation
};

// cost(u1,v1) + cost(u2,v2) <= cost(u2,v1) + cost(u1,v2) for all u1 < u2, v1 < v2 on the grids.
inline QuasiAntitoneReport is_quasi_antitone(const PointwiseCost& cost, const std::vector<double>& us,
                                             const std::vector<double>& vs, double tol = 1e-12) {
  QuasiAntitoneReport rep;
  const std::size_t nu = us.size(), nv = vs.size();
  std::vector<double> c(nu * nv);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nv; ++j) c[i * nv + j] = cost(us[i], vs[j]);
  for (std::size_t i1 = 0; i1 < nu; ++i1)
    for (std::size_t i2 = 0; i2 < nu; ++i2) {
      if (!(us[i1] < us[i2])) continue;
      for (std::size_t j1 = 0; j1 < nv; ++j1)
        for (std::size_t j2 = 0; j2 < nv; ++j2) {
          if (!(vs[j1] < vs[j2])) continue;
          double lhs = c[i1 * nv + j1] + c[i2 * nv + j2];
          double rhs = c[i2 * nv + j1] + c[i1 * nv + j2];
          double ex = lhs - rhs;
          if (ex > tol * std::max(1.0, std::abs(rhs)) && ex > rep.excess) {
            rep = {false, us[i1], us[i2], vs[j1], vs[j2], ex};
          }
        }
    }
  return rep;
}

// Integral over (0, 1) of cost(F_P^{-1}(x), F_Q^{-1}(x)) under a quadrature measure.
inline ExtendedReal comonotone_cost(const PointwiseCost& cost, const Distribution& p, const Distribution& q,
                                    const AggregationMeasure& m) {
  return integrate(m, [&](double x) { return ExtendedReal(cost(p.quantile(x), q.quantile(x))); });
}

// Exact comonotone cost between two pmfs: both quantile functions are step functions.
inline double comonotone_cost_exact(const PointwiseCost& cost, const DiscreteDistribution& p,
                                    const DiscreteDistribution& q) {
  const auto& cp = p.cumulative();
  const auto& cq = q.cumulative();
  std::size_t i = 0, j = 0;
  double prev = 0.0, total = 0.0;
  while (i < cp.size() && j < cq.size()) {
    double next = std::min(cp[i], cq[j]);
    if (next > prev) total += (next - prev) * cost(p.support()[i], q.support()[j]);
    prev = next;
    if (cp[i] == next) ++i;
    if (cq[j] == next) ++j;
  }
  return total;
}

// x -> F_Q^{-1}(F_P(x))
inline std::function<double(double)> monge_map(const Distribution& p, const Distribution& q) {
  return [p, q](double x) {
    double u = std::clamp(p.cdf(x), 0.0, 1.0);
    if (u <= 0.0) return q.quantile(std::numeric_limits<double>::min());
    return q.quantile(u);
  };
}

struct KtpResult {
  double value = 0.0;
  std::vector<std::vector<double>> plan;  // rows: support of P, cols: support of Q
  int atoms = 0;
};

namespace detail {

// Smallest n <= max_atoms with every n * w_i an integer to within 1e-6.
inline int common_denominator(const std::vector<double>& a, const std::vector<double>& b, int max_atoms) {
  for (int n = 1; n <= max_atoms; ++n) {
    auto fits = [n](const std::vector<double>& w) {
      return std::all_of(w.begin(), w.end(), [n](double x) { return std::abs(x * n - std::round(x * n)) <= 1e-6; });
    };
    if (fits(a) && fits(b)) return n;
  }
  throw ConfigError("marginals do not split into at most " + std::to_string(max_atoms) + " equal atoms");
}

inline std::vector<std::size_t> expand_atoms(const std::vector<double>& w, int n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (long k = 0; k < std::lround(w[i] * n); ++k) out.push_back(i);
  if (out.size() != static_cast<std::size_t>(n)) throw ConfigError("weights do not sum to 1 after rationalisation");
  return out;
}

}  // namespace detail

// Minimum-cost coupling by enumerating all pairings of equal-mass atoms.
// Ties keep the lexicographically first permutation.
inline KtpResult brute_force_ktp(const PointwiseCost& cost, const DiscreteDistribution& p,
                                 const DiscreteDistribution& q, int max_atoms = 10) {
  int n = detail::common_denominator(p.weights(), q.weights(), max_atoms);
  auto ai = detail::expand_atoms(p.weights(), n);
  auto bj = detail::expand_atoms(q.weights(), n);
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> c(un * un);
  for (std::size_t i = 0; i < un; ++i)
    for (std::size_t j = 0; j < un; ++j) c[i * un + j] = cost(p.support()[ai[i]], q.support()[bj[j]]);
  std::vector<std::size_t> perm(un), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_sum = kInfinity;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < un; ++i) s += c[i * un + perm[i]];
    if (s < best_sum) {
      best_sum = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  KtpResult r;
  r.atoms = n;
  r.value = best_sum / n;
  r.plan.assign(p.size(), std::vector<double>(q.size(), 0.0));
  for (std::size_t i = 0; i < un; ++i) r.plan[ai[i]][bj[best[i]]] += 1.0 / n;
  return r;
}

struct TransportCertificate {
  double brute_force = 0.0;
  double comonotone = 0.0;
  double gap = 0.0;
  bool quasi_antitone = false;
};

// Compares the enumerated optimum with the comonotone coupling and checks the cost condition
// on the union of both supports.
inline TransportCertificate transport_certificate(const PointwiseCost& cost, const DiscreteDistribution& p,
                                                  const DiscreteDistribution& q) {
  TransportCertificate cert;
  cert.brute_force = brute_force_ktp(cost, p, q).value;
  cert.comonotone = comonotone_cost_exact(cost, p, q);
  cert.gap = std::abs(cert.brute_force - cert.comonotone);
  cert.quasi_antitone = is_quasi_antitone(cost, p.support(), q.support()).holds;
  return cert;
}

// Integral of |F_P - F_Q| over the line, exact for pmfs.
inline double l1_cdf_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  std::vector<double> pts = p.support();
  pts.insert(pts.end(), q.support().begin(), q.support().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    total += (pts[k + 1] - pts[k]) * std::abs(p.cdf(pts[k]) - q.cdf(pts[k]));
  return total;
}

// Integral over (0, 1) of |F_P^{-1} - F_Q^{-1}|, exact for pmfs.
inline double l1_quantile_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  return comonotone_cost_exact(PointwiseCost::custom([](double u, double v) { return std::abs(u - v); }, "abs"), p, q);
}

}  // namespace bsdiv
