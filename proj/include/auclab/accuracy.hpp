#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "auclab/consistency.hpp"
#include "auclab/distribution.hpp"
#include "auclab/loss.hpp"
#include "auclab/regret.hpp"
#include "auclab/risk.hpp"
#include "auclab/trials.hpp"

namespace auclab {

/// R_acc(f) = E[I[y f(x) < 0]]. Both indicators are strict, so a zero score
/// counts as no error.
inline double accuracy_risk(const DiscreteDistribution& d, const ScoreVector& f) {
  require_compatible(d, f);
  double r = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    r += d.marginal(i) * (d.eta(i) * (f[i] < 0.0 ? 1.0 : 0.0) + (1.0 - d.eta(i)) * (f[i] > 0.0 ? 1.0 : 0.0));
  }
  return r;
}

inline double bayes_accuracy_risk(const DiscreteDistribution& d) {
  double r = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) r += d.marginal(i) * std::min(d.eta(i), 1.0 - d.eta(i));
  return r;
}

/// E[eta e^{-f} + (1 - eta) e^{f}].
inline double phi_acc_risk(const DiscreteDistribution& d, const ScoreVector& f) {
  require_compatible(d, f);
  double r = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    r += d.marginal(i) * (d.eta(i) * std::exp(-f[i]) + (1.0 - d.eta(i)) * std::exp(f[i]));
  }
  return r;
}

/// 2 E[sqrt(eta (1 - eta))]; attained only when every eta lies in (0,1).
inline double optimal_phi_acc_risk(const DiscreteDistribution& d) {
  double r = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) r += d.marginal(i) * std::sqrt(d.eta(i) * (1.0 - d.eta(i)));
  return 2.0 * r;
}

inline bool phi_acc_optimum_attained(const DiscreteDistribution& d) {
  for (double e : d.eta()) {
    if (e <= 0.0 || e >= 1.0) return false;
  }
  return true;
}

/// Minimizer of t -> R_phi_acc(f - t): with A = E[eta e^{-f}] and
/// B = E[(1 - eta) e^{f}] the objective is A e^t + B e^{-t}, so
/// t* = (ln B - ln A) / 2.
inline double optimal_threshold(const DiscreteDistribution& d, const ScoreVector& f) {
  require_compatible(d, f);
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    a += d.marginal(i) * d.eta(i) * std::exp(-f[i]);
    b += d.marginal(i) * (1.0 - d.eta(i)) * std::exp(f[i]);
  }
  return 0.5 * std::log(b) - 0.5 * std::log(a);
}

struct AccuracyRiskReport {
  double acc_risk = 0.0;
  double bayes_acc_risk = 0.0;
  double phi_acc_risk = 0.0;
  double optimal_phi_acc_risk = 0.0;
  double threshold = 0.0;
  bool optimum_attained = true;
};

inline AccuracyRiskReport make_accuracy_report(const DiscreteDistribution& d, const ScoreVector& f) {
  return {accuracy_risk(d, f), bayes_accuracy_risk(d), phi_acc_risk(d, f), optimal_phi_acc_risk(d),
          optimal_threshold(d, f), phi_acc_optimum_attained(d)};
}

/// Exact R_phi* for exponential pairwise loss via the pointwise construction.
inline double exponential_optimal_phi_risk(const DiscreteDistribution& d) {
  const SurrogateLoss exp = SurrogateLoss::exponential();
  return phi_risk(d, attainment_scores(d, exp), exp);
}

inline const std::vector<std::string>& chain_ids() {
  static const std::vector<std::string> ids{"T9", "T10", "T11a", "T11b", "T11c", "T11d"};
  return ids;
}

/// All six AUC/accuracy inequalities for exponential losses on one (d, f).
inline std::vector<BoundCheck> chain_checks(const DiscreteDistribution& d, const ScoreVector& f, std::size_t trial = 0,
                                            std::uint64_t seed = 0) {
  const SurrogateLoss exp = SurrogateLoss::exponential();
  const double p = d.positive_rate();
  const double pq = p * (1.0 - p);
  const double phi_regret = std::max(0.0, phi_risk(d, f, exp) - exponential_optimal_phi_risk(d));
  const double auc_regret = auc_risk(d, f) - bayes_risk(d);
  const double acc_phi = phi_acc_risk(d, f);
  const double acc_phi_star = optimal_phi_acc_risk(d);
  const double acc_phi_regret = std::max(0.0, acc_phi - acc_phi_star);
  const ScoreVector thresholded = f.shifted(-optimal_threshold(d, f));
  const double acc_star = bayes_accuracy_risk(d);
  const std::string name = exp.name();

  std::vector<BoundCheck> out;
  out.push_back(make_check(trial, seed, "T9", name, pq * phi_regret, acc_phi * acc_phi_regret, d, f));
  out.push_back(make_check(trial, seed, "T10", name, phi_acc_risk(d, thresholded) - acc_phi_star,
                           2.0 * std::sqrt(pq * phi_regret), d, f));
  out.push_back(make_check(trial, seed, "T11a", name, auc_regret, std::sqrt(acc_phi / pq * acc_phi_regret), d, f));
  out.push_back(make_check(trial, seed, "T11b", name, accuracy_risk(d, f) - acc_star,
                           std::sqrt(2.0) * std::sqrt(acc_phi_regret), d, f));
  out.push_back(make_check(trial, seed, "T11c", name, auc_regret, std::sqrt(phi_regret), d, f));
  out.push_back(make_check(trial, seed, "T11d", name, accuracy_risk(d, thresholded) - acc_star,
                           2.0 * std::pow(pq * phi_regret, 0.25), d, f));
  return out;
}

namespace detail {

inline DistributionSampling bridge_sampling() { return {2, 6, 0.05, 0.95}; }

// Scores exactly zero sit on the accuracy tie convention; redraw them.
inline ScoreVector nonzero_scores(std::mt19937_64& rng, std::size_t n) {
  for (;;) {
    ScoreVector f = sample_scores(rng, n);
    bool ok = true;
    for (double v : f.values()) ok = ok && v != 0.0;
    if (ok) return f;
  }
}

inline std::vector<std::vector<BoundCheck>> chain_suite(std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  return run_trials<std::vector<BoundCheck>>(trials, [&](std::size_t i) {
    const std::uint64_t s = trial_seed(seed, i);
    std::mt19937_64 rng(s);
    const DiscreteDistribution d = sample_distribution(rng, bridge_sampling());
    const ScoreVector f = nonzero_scores(rng, d.size());
    return chain_checks(d, f, i, s);
  });
}

inline std::vector<BoundCheck> select_chain(std::size_t trials, std::uint64_t seed, const std::string& id) {
  std::vector<BoundCheck> out;
  for (auto& row : chain_suite(trials, seed)) {
    for (auto& c : row) {
      if (c.id == id) out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace detail

/// p(1-p) (R_phi - R_phi*) <= R_phi_acc (R_phi_acc - R_phi_acc*).
inline std::vector<BoundCheck> verify_acc_to_auc(std::size_t trials, std::uint64_t seed) {
  return detail::select_chain(trials, seed, "T9");
}

/// R_phi_acc(f - t*) - R_phi_acc* <= 2 sqrt(p(1-p) (R_phi - R_phi*)).
inline std::vector<BoundCheck> verify_auc_to_acc(std::size_t trials, std::uint64_t seed) {
  return detail::select_chain(trials, seed, "T10");
}

/// Every chain inequality per trial, ordered by trial then id.
inline std::vector<BoundCheck> verify_combined_chain(std::size_t trials, std::uint64_t seed) {
  std::vector<BoundCheck> out;
  for (auto& row : detail::chain_suite(trials, seed)) {
    for (auto& c : row) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace auclab
