#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "auclab/distribution.hpp"
#include "auclab/loss.hpp"
#include "auclab/scalar_min.hpp"

namespace auclab {

/// Default half-width of the score box; e^{-30} is below every tolerance used here.
inline constexpr double kDefaultRadius = 30.0;

/// Loss on an ordered (positive-role, negative-role) pair with score
/// difference alpha: 1 if misordered, 1/2 on a tie, 0 otherwise.
inline double ranking_loss(double alpha) noexcept {
  if (alpha < 0.0) return 1.0;
  if (alpha == 0.0) return 0.5;
  return 0.0;
}

namespace detail {

// 1 / (2p(1-p)), the normalizer shared by every pairwise risk.
inline double pair_normalizer(double p) { return 1.0 / (2.0 * p * (1.0 - p)); }

// sum over ordered pairs (i, j), diagonal included, of
//   m_i m_j [eta_i (1 - eta_j) g(f_i - f_j) + eta_j (1 - eta_i) g(f_j - f_i)]
template <class G>
double symmetric_pair_sum(const DiscreteDistribution& d, const ScoreVector& f, G&& g) {
  const auto m = d.marginal();
  const auto eta = d.eta();
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double a = f[i] - f[j];
      total += m[i] * m[j] * (eta[i] * (1.0 - eta[j]) * g(a) + eta[j] * (1.0 - eta[i]) * g(-a));
    }
  }
  return total;
}

}  // namespace detail

/// R(f): expected ranking loss over cross-class pairs, ties counted half.
inline double auc_risk(const DiscreteDistribution& d, const ScoreVector& f) {
  require_compatible(d, f);
  return detail::pair_normalizer(d.positive_rate()) *
         detail::symmetric_pair_sum(d, f, [](double a) { return ranking_loss(a); });
}

/// AUC_D(f) = Pr[f(x+) > f(x-)] + Pr[f(x+) = f(x-)] / 2 with x+ ~ D_+ and
/// x- ~ D_-, computed by a sweep over sorted score levels rather than the pair
/// sum, so it serves as an independent check on auc_risk.
inline double auc(const DiscreteDistribution& d, const ScoreVector& f) {
  require_compatible(d, f);
  const std::size_t n = d.size();
  const double p = d.positive_rate();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  double negative_below = 0.0;
  double result = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t stop = start;
    double pos_level = 0.0;
    double neg_level = 0.0;
    while (stop < n && f[order[stop]] == f[order[start]]) {
      const std::size_t k = order[stop];
      pos_level += d.marginal(k) * d.eta(k) / p;
      neg_level += d.marginal(k) * (1.0 - d.eta(k)) / (1.0 - p);
      ++stop;
    }
    result += pos_level * (negative_below + 0.5 * neg_level);
    negative_below += neg_level;
    start = stop;
  }
  return result;
}

/// Scores that order instances by eta, equal eta sharing a score (dense rank).
inline ScoreVector bayes_scores(const DiscreteDistribution& d) {
  std::vector<double> levels(d.eta().begin(), d.eta().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<double> scores(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    scores[i] = static_cast<double>(std::lower_bound(levels.begin(), levels.end(), d.eta(i)) - levels.begin());
  }
  return ScoreVector(std::move(scores));
}

/// R* = R(f) for any f in the Bayes-optimal set.
inline double bayes_risk(const DiscreteDistribution& d) { return auc_risk(d, bayes_scores(d)); }

/// R_phi(f): expected pairwise surrogate risk.
template <PairwiseLoss L>
double phi_risk(const DiscreteDistribution& d, const ScoreVector& f, const L& phi) {
  require_compatible(d, f);
  return detail::pair_normalizer(d.positive_rate()) *
         detail::symmetric_pair_sum(d, f, [&](double a) { return phi.value(a); });
}

/// Gradient (right-derivative convention at kinks) of R_phi with respect to f.
template <PairwiseLoss L>
std::vector<double> phi_risk_gradient(const DiscreteDistribution& d, const ScoreVector& f, const L& phi) {
  require_compatible(d, f);
  const auto m = d.marginal();
  const auto eta = d.eta();
  const std::size_t n = d.size();
  // R_phi = (1/(p(1-p))) sum_ij m_i m_j eta_i (1 - eta_j) phi(f_i - f_j)
  const double scale = 2.0 * detail::pair_normalizer(d.positive_rate());
  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = scale * m[i] * m[j] * eta[i] * (1.0 - eta[j]);
      if (w == 0.0) continue;
      const double g = w * phi.derivative(f[i] - f[j]);
      grad[i] += g;
      grad[j] -= g;
    }
  }
  return grad;
}

/// C(eta, eta', alpha) with the 1/(2p(1-p)) prefactor.
template <PairwiseLoss L>
double conditional_phi_risk(double eta, double eta_prime, double alpha, const L& phi, double p) {
  return detail::pair_normalizer(p) *
         (eta * (1.0 - eta_prime) * phi.value(alpha) + eta_prime * (1.0 - eta) * phi.value(-alpha));
}

/// Infimum of C over a range of alpha. `unattained` is set when the best
/// alpha sits on the score box and the objective is still decreasing there.
struct ConditionalOptimum {
  double value = 0.0;
  double alpha = 0.0;
  bool unattained = false;
};

namespace detail {

template <PairwiseLoss L>
std::vector<double> conditional_candidates(const L& phi) {
  std::vector<double> out{0.0};
  if constexpr (requires { phi.breakpoints(); }) {
    for (double b : phi.breakpoints()) {
      out.push_back(b);
      out.push_back(-b);
    }
  }
  return out;
}

template <PairwiseLoss L>
ConditionalOptimum conditional_minimum(double eta, double eta_prime, const L& phi, double p, double lo,
                                       double hi, double radius) {
  const auto candidates = conditional_candidates(phi);
  auto c = [&](double a) { return conditional_phi_risk(eta, eta_prime, a, phi, p); };
  const ScalarMinimum best = minimize_convex_1d(c, lo, hi, candidates);
  ConditionalOptimum out{best.value, best.argmin, false};
  // Strictly decreasing at a box edge means the infimum lies beyond it.
  constexpr double kEdge = 1e-6;
  if (best.argmin >= radius - kEdge && c(radius - kEdge) > best.value) out.unattained = true;
  if (best.argmin <= -radius + kEdge && c(-radius + kEdge) > best.value) out.unattained = true;
  return out;
}

}  // namespace detail

/// H(eta, eta'): optimal conditional phi-risk over alpha in [-radius, radius].
template <PairwiseLoss L>
ConditionalOptimum optimal_conditional_risk(double eta, double eta_prime, const L& phi, double p,
                                            double radius = kDefaultRadius) {
  return detail::conditional_minimum(eta, eta_prime, phi, p, -radius, radius, radius);
}

/// H^-(eta, eta'): infimum of C over the wrong-direction half-line
/// alpha (eta - eta') <= 0. Equals H when eta == eta'.
template <PairwiseLoss L>
double restricted_conditional_risk(double eta, double eta_prime, const L& phi, double p,
                                   double radius = kDefaultRadius) {
  if (eta > eta_prime) return detail::conditional_minimum(eta, eta_prime, phi, p, -radius, 0.0, radius).value;
  if (eta < eta_prime) return detail::conditional_minimum(eta, eta_prime, phi, p, 0.0, radius, radius).value;
  return optimal_conditional_risk(eta, eta_prime, phi, p, radius).value;
}

/// E_{x,x'}[inf_alpha C(eta(x), eta(x'), alpha)], the pointwise lower bound on R_phi*.
template <PairwiseLoss L>
double pointwise_risk_bound(const DiscreteDistribution& d, const L& phi, double radius = kDefaultRadius) {
  const double p = d.positive_rate();
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      total += d.marginal(i) * d.marginal(j) * optimal_conditional_risk(d.eta(i), d.eta(j), phi, p, radius).value;
    }
  }
  return total;
}

struct RiskReport {
  double auc_risk = 0.0;
  double bayes_risk = 0.0;
  double phi_risk = 0.0;
  double optimal_phi_risk = 0.0;
  double auc_regret = 0.0;
  double phi_regret = 0.0;
};

/// Bundles the risks of f given a reference value for R_phi*.
template <PairwiseLoss L>
RiskReport make_risk_report(const DiscreteDistribution& d, const ScoreVector& f, const L& phi,
                            double optimal_phi_risk) {
  RiskReport r;
  r.auc_risk = auc_risk(d, f);
  r.bayes_risk = bayes_risk(d);
  r.phi_risk = phi_risk(d, f, phi);
  r.optimal_phi_risk = optimal_phi_risk;
  r.auc_regret = r.auc_risk - r.bayes_risk;
  r.phi_regret = r.phi_risk - r.optimal_phi_risk;
  return r;
}

}  // namespace auclab
