#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "core.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "generator.hpp"

namespace bsdiv {

namespace detail {
inline void require_same_support(const DiscreteDistribution& q, const DiscreteDistribution& p) {
  if (q.support() != p.support()) throw ConfigError("Q and P must share one support");
}
}  // namespace detail

// sum g dQ - sum phi_*(g) dP; atoms with P = 0 contribute nothing to the second sum.
inline ExtendedReal dual_objective(const Generator& gen, const std::vector<double>& g, const DiscreteDistribution& q,
                                   const DiscreteDistribution& p) {
  detail::require_same_support(q, p);
  if (g.size() != q.size()) throw ConfigError("witness length differs from the support size");
  ExtendedReal s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s += g[i] * q.weights()[i];
    s -= ExtendedReal(p.weights()[i]) * gen.fenchel_conjugate(g[i]);
  }
  return s;
}

// g* = phi'(dQ/dP); needs P > 0 and a differentiable generator.
inline std::vector<double> optimal_witness(const Generator& gen, const DiscreteDistribution& q,
                                           const DiscreteDistribution& p) {
  detail::require_same_support(q, p);
  if (!gen.differentiable()) throw ConfigError("optimal witness needs a differentiable generator");
  std::vector<double> g(q.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double pi = p.weights()[i];
    if (!(pi > 0.0)) throw ConfigError("optimal witness needs P > 0 on the support");
    double ratio = q.weights()[i] / pi;
    if (!gen.in_open_domain(ratio))
      throw DomainError("dQ/dP = " + ExtendedReal(ratio).str() + " lies outside the open generator domain");
    g[i] = gen.right_derivative(ratio);
  }
  return g;
}

// sum p phi(q/p), +inf unless Q << P.
inline ExtendedReal divergence_tilde(const Generator& gen, const DiscreteDistribution& q,
                                     const DiscreteDistribution& p) {
  detail::require_same_support(q, p);
  ExtendedReal s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double qi = q.weights()[i], pi = p.weights()[i];
    if (pi == 0.0) {
      if (qi > 0.0) return ExtendedReal::infinity();
      continue;
    }
    s += ExtendedReal(pi) * gen.phi_bar(qi / pi);
  }
  return s;
}

struct AttainmentReport {
  ExtendedReal divergence;
  ExtendedReal dual_at_optimum;
  double gap = 0.0;
  double max_excess = -kInfinity;  // largest dual(g* + eps eta) - dual(g*)
  int trials = 0;
  bool attained = false;
  bool weak_duality = true;
};

// Strong duality at g*, then weak duality at seeded Gaussian perturbations of size 1e-2, 1e-1, 1.
inline AttainmentReport verify_attainment(const Generator& gen, const DiscreteDistribution& q,
                                          const DiscreteDistribution& p, int trials = 1000, unsigned seed = 0) {
  AttainmentReport rep;
  auto gstar = optimal_witness(gen, q, p);
  rep.divergence = divergence_tilde(gen, q, p);
  rep.dual_at_optimum = dual_objective(gen, gstar, q, p);
  rep.gap = std::abs(rep.divergence.value() - rep.dual_at_optimum.value());
  rep.attained = rep.gap <= 1e-10 * std::max(1.0, std::abs(rep.divergence.value()));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const double eps[] = {1e-2, 1e-1, 1.0};
  std::vector<double> g(gstar.size());
  for (int t = 0; t < trials; ++t) {
    double e = eps[t % 3];
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = gstar[i] + e * nd(rng);
    ExtendedReal d = dual_objective(gen, g, q, p);
    double ex = d.is_neg_inf() ? -kInfinity : d.value() - rep.dual_at_optimum.value();
    rep.max_excess = std::max(rep.max_excess, ex);
    if (ex > 1e-12) rep.weak_duality = false;
  }
  rep.trials = trials;
  return rep;
}

// Witnesses restricted to the span of the basis vectors.
struct WitnessFamily {
  std::vector<std::vector<double>> basis;
};

// Maximises the concave dual over the span by gradient ascent with backtracking.
inline ExtendedReal restricted_dual_sup(const Generator& gen, const WitnessFamily& fam, const DiscreteDistribution& q,
                                        const DiscreteDistribution& p, int iterations = 500) {
  detail::require_same_support(q, p);
  const std::size_t k = fam.basis.size(), n = q.size();
  for (const auto& b : fam.basis)
    if (b.size() != n) throw ConfigError("basis vector length differs from the support size");
  std::vector<double> beta(k, 0.0);
  auto witness = [&](const std::vector<double>& bt) {
    std::vector<double> g(n, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) g[i] += bt[j] * fam.basis[j][i];
    return g;
  };
  ExtendedReal cur = dual_objective(gen, witness(beta), q, p);
  for (int it = 0; it < iterations; ++it) {
    auto g = witness(beta);
    std::vector<double> grad(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double h = 1e-6 * std::max(1.0, std::abs(g[i]));
      ExtendedReal up = gen.fenchel_conjugate(g[i] + h), dn = gen.fenchel_conjugate(g[i] - h);
      if (!up.is_finite() || !dn.is_finite()) continue;
      double dconj = (up.value() - dn.value()) / (2.0 * h);
      double gi = q.weights()[i] - p.weights()[i] * dconj;
      for (std::size_t j = 0; j < k; ++j) grad[j] += gi * fam.basis[j][i];
    }
    double norm = 0.0;
    for (double x : grad) norm += x * x;
    if (norm < 1e-24) break;
    double step = 1.0;
    bool moved = false;
    while (step > 1e-12) {
      std::vector<double> trial(beta);
      for (std::size_t j = 0; j < k; ++j) trial[j] += step * grad[j];
      ExtendedReal v = dual_objective(gen, witness(trial), q, p);
      if (v > cur) {
        beta = trial;
        cur = v;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return cur;
}

}  // namespace bsdiv
