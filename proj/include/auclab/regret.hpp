#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "auclab/distribution.hpp"
#include "auclab/loss.hpp"
#include "auclab/optimizer.hpp"
#include "auclab/risk.hpp"
#include "auclab/trials.hpp"

namespace auclab {

inline constexpr double kBoundTolerance = 1e-7;
inline constexpr double kSlackFloor = -1e-9;

struct RegretPair {
  double auc_regret = 0.0;
  double phi_regret = 0.0;
  bool infimum_unattained = false;
};

/// (R(f) - R*, R_phi(f) - R_phi*) with R_phi* from minimize_phi_risk.
inline RegretPair regret_pair(const DiscreteDistribution& d, const ScoreVector& f, const SurrogateLoss& phi,
                              const OptimizerConfig& config = {}) {
  const MinimizationResult m = minimize_phi_risk(d, phi, config);
  if (!m.converged) throw std::runtime_error("optimizer did not converge for " + phi.name());
  return {auc_risk(d, f) - bayes_risk(d), phi_risk(d, f, phi) - m.value, m.infimum_unattained};
}

/// One verified inequality instance. The instance itself is kept so a
/// violation can be replayed outside the suite.
struct BoundCheck {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string id;
  std::string loss;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::vector<double> marginal;
  std::vector<double> eta;
  std::vector<double> scores;

  std::size_t n() const noexcept { return eta.size(); }
  bool holds(double tolerance = kBoundTolerance) const noexcept { return lhs <= rhs + tolerance; }
};

inline BoundCheck make_check(std::size_t trial, std::uint64_t seed, std::string id, std::string loss, double lhs,
                             double rhs, const DiscreteDistribution& d, const ScoreVector& f) {
  BoundCheck c;
  c.trial = trial;
  c.seed = seed;
  c.id = std::move(id);
  c.loss = std::move(loss);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = rhs - lhs;
  c.marginal.assign(d.marginal().begin(), d.marginal().end());
  c.eta.assign(d.eta().begin(), d.eta().end());
  c.scores.assign(f.values().begin(), f.values().end());
  return c;
}

inline std::size_t count_violations(const std::vector<BoundCheck>& checks, double tolerance = kBoundTolerance) {
  std::size_t v = 0;
  for (const auto& c : checks) v += !c.holds(tolerance);
  return v;
}

/// The square-root bound R - R* <= factor * sqrt(R_phi - R_phi*) on one
/// instance. R_phi* is lowered by the optimizer's suboptimality bound so
/// incomplete minimization can only loosen the check.
inline BoundCheck sqrt_bound_check(const DiscreteDistribution& d, const ScoreVector& f, const SurrogateLoss& phi,
                                   double factor, std::size_t trial, std::uint64_t seed,
                                   const OptimizerConfig& config = {}) {
  const MinimizationResult m = minimize_phi_risk(d, phi, config);
  if (!m.converged) throw std::runtime_error("optimizer did not converge for " + phi.name());
  const double phi_regret = std::max(0.0, phi_risk(d, f, phi) - (m.value - m.suboptimality_bound));
  const double lhs = auc_risk(d, f) - bayes_risk(d);
  return make_check(trial, seed, phi.name(), phi.name(), lhs, factor * std::sqrt(phi_regret), d, f);
}

namespace detail {

inline std::vector<BoundCheck> sqrt_bound_suite(const SurrogateLoss& phi, double factor, std::size_t trials,
                                                std::uint64_t seed, const OptimizerConfig& config) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  return run_trials<BoundCheck>(trials, [&](std::size_t i) {
    const std::uint64_t s = trial_seed(seed, i);
    std::mt19937_64 rng(s);
    const DiscreteDistribution d = sample_distribution(rng);
    const ScoreVector f = sample_scores(rng, d.size());
    return sqrt_bound_check(d, f, phi, factor, i, s, config);
  });
}

}  // namespace detail

/// R - R* <= sqrt(R_phi - R_phi*) for exponential loss on random (d, f).
inline std::vector<BoundCheck> verify_exp_bound(std::size_t trials, std::uint64_t seed,
                                                const OptimizerConfig& config = {}) {
  return detail::sqrt_bound_suite(SurrogateLoss::exponential(), 1.0, trials, seed, config);
}

/// R - R* <= 2 sqrt(R_phi - R_phi*) for logistic loss on random (d, f).
inline std::vector<BoundCheck> verify_logistic_bound(std::size_t trials, std::uint64_t seed,
                                                     const OptimizerConfig& config = {}) {
  return detail::sqrt_bound_suite(SurrogateLoss::logistic(), 2.0, trials, seed, config);
}

/// Closed-form minimizer of C(eta, eta', .): half the log-ratio for
/// exponential, the full log-ratio for logistic.
inline double closed_form_difference(double eta, double eta_prime, const SurrogateLoss& phi) {
  const double a = eta * (1.0 - eta_prime);
  const double b = eta_prime * (1.0 - eta);
  if (phi.kind() == LossKind::exponential) return 0.5 * std::log(a / b);
  if (phi.kind() == LossKind::logistic) return std::log(a / b);
  throw std::invalid_argument("closed-form optimum exists only for exp and logistic, not " + phi.name());
}

/// F(eta) = C(0) - C(alpha*) - (eta - eta')^2 / 4 for logistic loss, up to the
/// 1/(2p(1-p)) prefactor. Nonnegative exactly when the conditional-regret
/// inequality holds.
inline double logistic_gap_function(double eta, double eta_prime) {
  const double a = eta * (1.0 - eta_prime);
  const double b = eta_prime * (1.0 - eta);
  const double diff = eta - eta_prime;
  return std::log(2.0) * (a + b) - diff * diff / 4.0 - a * std::log1p(b / a) - b * std::log1p(a / b);
}

inline double logistic_gap_second_derivative(double eta, double eta_prime) {
  return eta_prime * (1.0 - eta_prime) / (eta * (1.0 - eta) * (eta + eta_prime - 2.0 * eta * eta_prime)) - 0.5;
}

struct Theorem8Report {
  SurrogateLoss loss;
  std::size_t samples = 0;
  /// Pairs where alpha* (eta - eta') <= 0.
  std::size_t sign_failures = 0;
  /// Largest |closed-form alpha* - numeric argmin of C|.
  double max_argmin_error = 0.0;
  /// min over samples of C(0) - C(alpha*) - c (eta - eta')^2 / (2p(1-p)),
  /// c = 1 for exponential and 1/4 for logistic.
  double min_conditional_slack = std::numeric_limits<double>::infinity();
  std::size_t conditional_failures = 0;
  /// Logistic only: |F(eta')| and |F'(eta')| maxima, and the F'' checks on
  /// pairs with |eta' - 1/2| <= |eta - 1/2|.
  double max_f_at_diagonal = 0.0;
  double max_fprime_at_diagonal = 0.0;
  double min_second_derivative = std::numeric_limits<double>::infinity();
  double max_second_derivative_error = 0.0;
  std::size_t convexity_samples = 0;
};

inline Theorem8Report theorem8_hypothesis_check(const SurrogateLoss& phi, std::size_t samples, std::uint64_t seed = 0,
                                                double lo = 0.02, double hi = 0.98) {
  if (phi.kind() != LossKind::exponential && phi.kind() != LossKind::logistic) {
    throw std::invalid_argument("hypothesis check covers exp and logistic only, not " + phi.name());
  }
  const bool logistic = phi.kind() == LossKind::logistic;
  const double c = logistic ? 0.25 : 1.0;
  Theorem8Report r{phi};
  r.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_real_distribution<double> prate(0.05, 0.95);
  for (std::size_t k = 0; k < samples; ++k) {
    const double eta = u(rng);
    const double eta_prime = u(rng);
    const double p = prate(rng);
    if (eta == eta_prime) continue;
    const double alpha = closed_form_difference(eta, eta_prime, phi);
    if (!(alpha * (eta - eta_prime) > 0.0)) ++r.sign_failures;
    const ConditionalOptimum numeric = optimal_conditional_risk(eta, eta_prime, phi, p);
    r.max_argmin_error = std::max(r.max_argmin_error, std::abs(numeric.alpha - alpha));

    const double drop =
        conditional_phi_risk(eta, eta_prime, 0.0, phi, p) - conditional_phi_risk(eta, eta_prime, alpha, phi, p);
    const double diff = eta - eta_prime;
    const double slack = drop - c * diff * diff * detail::pair_normalizer(p);
    r.min_conditional_slack = std::min(r.min_conditional_slack, slack);
    if (slack < -1e-12) ++r.conditional_failures;

    if (logistic) {
      // Central differences with one Richardson step (error O(h^4)); F has
      // large higher derivatives near the ends of [lo, hi].
      auto gap = [&](double a) { return logistic_gap_function(a, eta_prime); };
      auto d1 = [&](double x, double h) { return (gap(x + h) - gap(x - h)) / (2.0 * h); };
      auto d2 = [&](double x, double h) { return (gap(x + h) - 2.0 * gap(x) + gap(x - h)) / (h * h); };
      r.max_f_at_diagonal = std::max(r.max_f_at_diagonal, std::abs(gap(eta_prime)));
      const double fprime = (4.0 * d1(eta_prime, 5e-6) - d1(eta_prime, 1e-5)) / 3.0;
      r.max_fprime_at_diagonal = std::max(r.max_fprime_at_diagonal, std::abs(fprime));
      if (std::abs(eta_prime - 0.5) <= std::abs(eta - 0.5)) {
        ++r.convexity_samples;
        const double second = logistic_gap_second_derivative(eta, eta_prime);
        r.min_second_derivative = std::min(r.min_second_derivative, second);
        const double fd = (4.0 * d2(eta, 5e-4) - d2(eta, 1e-3)) / 3.0;
        r.max_second_derivative_error = std::max(r.max_second_derivative_error, std::abs(fd - second));
      }
    }
  }
  return r;
}

/// Losses with a realizable-setting bound and their kappa = 1/phi(0).
inline std::vector<SurrogateLoss> realizable_losses() {
  return {SurrogateLoss::exponential(), SurrogateLoss::hinge(), SurrogateLoss::general_hinge(),
          SurrogateLoss::q_norm_hinge(), SurrogateLoss::least_square(), SurrogateLoss::logistic()};
}

inline double realizable_kappa(const SurrogateLoss& phi) { return 1.0 / phi.value(0.0); }

/// Smallest R_phi over centered scores separating the classes with margins
/// 1, 2, 4, ... and finally 2 * radius (scores at +-radius); ~0 confirms
/// R_phi* = 0 is approached.
inline double separating_phi_risk(const DiscreteDistribution& d, const SurrogateLoss& phi,
                                  double radius = kDefaultRadius) {
  double best = std::numeric_limits<double>::infinity();
  for (double margin = 1.0;; margin = std::min(2.0 * margin, 2.0 * radius)) {
    std::vector<double> f(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) f[i] = margin * (d.eta(i) - 0.5);
    best = std::min(best, phi_risk(d, ScoreVector(std::move(f)), phi));
    if (margin >= 2.0 * radius) break;
  }
  return best;
}

/// R(f) - R* <= kappa (R_phi(f) - 0) on random realizable (d, f).
inline std::vector<BoundCheck> verify_realizable_bounds(const SurrogateLoss& phi, std::size_t trials,
                                                        std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  const double kappa = realizable_kappa(phi);
  return run_trials<BoundCheck>(trials, [&](std::size_t i) {
    const std::uint64_t s = trial_seed(seed, i);
    std::mt19937_64 rng(s);
    const DiscreteDistribution d = sample_realizable_distribution(rng);
    const ScoreVector f = sample_scores(rng, d.size());
    const double lhs = auc_risk(d, f) - bayes_risk(d);
    return make_check(i, s, phi.name(), phi.name(), lhs, kappa * phi_risk(d, f, phi), d, f);
  });
}

struct TracePoint {
  std::size_t iteration = 0;
  double phi_regret = 0.0;
  double auc_regret = 0.0;
};

/// (phi regret, AUC regret) along the optimizer's iterates, the final
/// value standing in for R_phi*.
inline std::vector<TracePoint> consistency_trace(const DiscreteDistribution& d, const SurrogateLoss& phi,
                                                 const OptimizerConfig& config = {}) {
  std::vector<TracePoint> raw;
  const double r_star = bayes_risk(d);
  auto observe = [&](std::size_t iter, const std::vector<double>& x, double fx) {
    raw.push_back({iter, fx, auc_risk(d, ScoreVector(x)) - r_star});
  };
  const MinimizationResult m = minimize_phi_risk(d, phi, config, observe);
  for (auto& t : raw) t.phi_regret -= m.value;
  return raw;
}

/// max AUC regret over iterates whose phi regret is at most eps.
inline double auc_regret_envelope(const std::vector<TracePoint>& trace, double eps) {
  double worst = 0.0;
  for (const auto& t : trace) {
    if (t.phi_regret <= eps) worst = std::max(worst, t.auc_regret);
  }
  return worst;
}

}  // namespace auclab
