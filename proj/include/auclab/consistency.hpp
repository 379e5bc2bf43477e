#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "auclab/distribution.hpp"
#include "auclab/loss.hpp"
#include "auclab/optimizer.hpp"
#include "auclab/risk.hpp"

namespace auclab {

inline constexpr double kCalibrationTolerance = 1e-9;

struct CalibrationReport {
  SurrogateLoss loss;
  double p = 0.5;
  double grid_lo = 0.0;
  double grid_hi = 0.0;
  std::size_t resolution = 0;
  /// Every (eta, eta') cell with eta != eta'.
  std::vector<std::pair<double, double>> grid;
  /// min over the grid of H^- - H.
  double min_margin = 0.0;
  std::pair<double, double> worst_cell{0.0, 0.0};
  bool calibrated = false;
};

/// Evaluates H^- - H on a resolution x resolution grid over [lo, hi]^2 and
/// reports the smallest margin. Calibrated means the margin exceeds 1e-9 on
/// every sampled cell; nothing is claimed off the grid.
inline CalibrationReport calibration_check(const SurrogateLoss& phi, std::size_t resolution = 25, double lo = 0.02,
                                           double hi = 0.98, double p = 0.5) {
  if (resolution < 3) throw std::invalid_argument("calibration grid needs resolution >= 3");
  CalibrationReport r{phi, p, lo, hi, resolution, {}, std::numeric_limits<double>::infinity(), {}, false};
  const double step = (hi - lo) / static_cast<double>(resolution - 1);
  for (std::size_t a = 0; a < resolution; ++a) {
    for (std::size_t b = 0; b < resolution; ++b) {
      if (a == b) continue;
      const double eta = lo + static_cast<double>(a) * step;
      const double eta_prime = lo + static_cast<double>(b) * step;
      r.grid.emplace_back(eta, eta_prime);
      const double h = optimal_conditional_risk(eta, eta_prime, phi, p).value;
      const double h_minus = restricted_conditional_risk(eta, eta_prime, phi, p);
      if (h_minus - h < r.min_margin) {
        r.min_margin = h_minus - h;
        r.worst_cell = {eta, eta_prime};
      }
    }
  }
  r.calibrated = r.min_margin > kCalibrationTolerance;
  return r;
}

struct Lemma2Gap {
  double inf_full = 0.0;
  double pointwise_bound = 0.0;
  double gap = 0.0;
};

inline std::size_t distinct_eta_count(const DiscreteDistribution& d) {
  return std::set<double>(d.eta().begin(), d.eta().end()).size();
}

/// inf_f R_phi (optimizer) against E[inf_alpha C] (pointwise). A positive gap
/// means the pairwise conditional optima cannot be realized by one score function.
inline Lemma2Gap lemma2_gap_check(const SurrogateLoss& phi, const DiscreteDistribution& d,
                                  const OptimizerConfig& config = {}) {
  if (distinct_eta_count(d) < 3) throw std::invalid_argument("gap check needs at least 3 distinct eta values");
  const MinimizationResult m = minimize_phi_risk(d, phi, config);
  if (!m.converged) throw std::runtime_error("optimizer did not converge for " + phi.name());
  Lemma2Gap g;
  g.inf_full = m.value;
  g.pointwise_bound = pointwise_risk_bound(d, phi, config.radius);
  g.gap = g.inf_full - g.pointwise_bound;
  return g;
}

enum class Construction { hinge, absolute };

inline std::string to_string(Construction c) { return c == Construction::hinge ? "hinge" : "absolute"; }

/// Three-point uniform construction where the surrogate optimum ties two
/// instances of different eta, so R_phi attains its infimum while the AUC
/// regret stays at a fixed positive value.
struct CounterexampleReport {
  Construction construction = Construction::hinge;
  std::array<double, 3> etas{};
  bool constraints_ok = false;
  double kappa0 = std::numeric_limits<double>::quiet_NaN();
  double kappa1 = std::numeric_limits<double>::quiet_NaN();
  double closed_form_optimum = std::numeric_limits<double>::quiet_NaN();
  double numeric_optimum = std::numeric_limits<double>::quiet_NaN();
  /// R_phi(f') for the non-optimal configuration f'_1 + 1 = f'_2 = f'_3 - 1.
  double suboptimal_value = std::numeric_limits<double>::quiet_NaN();
  /// suboptimal_value - numeric_optimum.
  double strict_gap = std::numeric_limits<double>::quiet_NaN();
  double closed_form_gap = std::numeric_limits<double>::quiet_NaN();
  /// R_phi of the constant sequence f<n> = f*.
  double sequence_phi_risk = std::numeric_limits<double>::quiet_NaN();
  /// R(f<n>) - R*.
  double persistent_auc_regret = std::numeric_limits<double>::quiet_NaN();
  double closed_form_auc_regret = std::numeric_limits<double>::quiet_NaN();
  ScoreVector numeric_minimizer;
};

inline bool hinge_constraints(double e1, double e2, double e3) {
  return e1 < e2 && e2 < e3 && 2.0 * e2 < e1 + e3 && 2.0 * e1 > e2 + e1 * e3;
}

inline bool absolute_constraints(double e1, double e2, double e3) {
  return e1 < e2 && e2 < e3 && 2.0 * e2 > e1 + e3;
}

namespace detail {

// Constant (kappa0) and pair coefficient (kappa1) of R_phi on the uniform
// three-point space, summed from the pair expansion: diagonal pairs give
// 2 m_i^2 eta_i (1 - eta_i) phi(0), each unordered off-diagonal pair appears
// twice with weight m_i m_j, all scaled by 1/(2p(1-p)).
inline std::pair<double, double> counterexample_kappas(const DiscreteDistribution& d, const SurrogateLoss& phi) {
  const double norm = pair_normalizer(d.positive_rate());
  double kappa0 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    kappa0 += norm * 2.0 * d.marginal(i) * d.marginal(i) * d.eta(i) * (1.0 - d.eta(i)) * phi.value(0.0);
  }
  const double kappa1 = norm * 2.0 * d.marginal(0) * d.marginal(1);
  return {kappa0, kappa1};
}

inline CounterexampleReport build_counterexample(Construction which, double e1, double e2, double e3,
                                                 const OptimizerConfig& config) {
  CounterexampleReport r;
  r.construction = which;
  r.etas = {e1, e2, e3};
  r.constraints_ok = which == Construction::hinge ? hinge_constraints(e1, e2, e3) : absolute_constraints(e1, e2, e3);
  if (!r.constraints_ok) return r;

  const SurrogateLoss phi = which == Construction::hinge ? SurrogateLoss::hinge() : SurrogateLoss::absolute();
  const auto d = DiscreteDistribution::uniform({e1, e2, e3});
  std::tie(r.kappa0, r.kappa1) = counterexample_kappas(d, phi);

  const ScoreVector optimum = which == Construction::hinge ? ScoreVector({0.0, 0.0, 1.0}) : ScoreVector({0.0, 1.0, 1.0});
  const ScoreVector suboptimal({0.0, 1.0, 2.0});
  if (which == Construction::hinge) {
    r.closed_form_optimum = r.kappa0 + r.kappa1 * (3 * e1 + 3 * e2 - 2 * e1 * e2 - 2 * e1 * e3 - 2 * e2 * e3);
    r.closed_form_gap = r.kappa1 * (2 * e1 - e2 - e1 * e3);
    r.closed_form_auc_regret = r.kappa1 * (e2 - e1) / 2.0;
  } else {
    r.closed_form_optimum = r.kappa0 + r.kappa1 * (4 * e1 + e2 + e3 - 2 * e1 * e2 - 2 * e1 * e3 - 2 * e2 * e3);
    r.closed_form_gap = r.kappa1 * (e1 + e2 - 2 * e1 * e3);
    r.closed_form_auc_regret = r.kappa1 * (e3 - e2) / 2.0;
  }

  const MinimizationResult m = minimize_phi_risk(d, phi, config);
  r.numeric_optimum = m.value;
  r.numeric_minimizer = m.minimizer;
  r.suboptimal_value = phi_risk(d, suboptimal, phi);
  r.strict_gap = r.suboptimal_value - r.numeric_optimum;
  r.sequence_phi_risk = phi_risk(d, optimum, phi);
  r.persistent_auc_regret = auc_risk(d, optimum) - bayes_risk(d);
  return r;
}

}  // namespace detail

/// Requires eta1 < eta2 < eta3, 2 eta2 < eta1 + eta3, 2 eta1 > eta2 + eta1 eta3.
/// The optimum sits at f1 = f2 = f3 - 1, tying instances 1 and 2.
inline CounterexampleReport hinge_counterexample(double eta1, double eta2, double eta3,
                                                 const OptimizerConfig& config = {}) {
  return detail::build_counterexample(Construction::hinge, eta1, eta2, eta3, config);
}

/// Requires eta1 < eta2 < eta3, 2 eta2 > eta1 + eta3. The optimum sits at
/// f1 = f2 - 1 = f3 - 1, tying instances 2 and 3.
inline CounterexampleReport absolute_counterexample(double eta1, double eta2, double eta3,
                                                    const OptimizerConfig& config = {}) {
  return detail::build_counterexample(Construction::absolute, eta1, eta2, eta3, config);
}

/// Rejection-samples a sorted triple from (0,1)^3 satisfying the construction's constraints.
inline std::array<double, 3> sample_counterexample_etas(Construction which, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    std::array<double, 3> e{u(rng), u(rng), u(rng)};
    std::sort(e.begin(), e.end());
    const bool ok = which == Construction::hinge ? hinge_constraints(e[0], e[1], e[2])
                                                 : absolute_constraints(e[0], e[1], e[2]);
    if (ok) return e;
  }
}

struct AttainmentReport {
  ScoreVector scores;
  double constructed_risk = 0.0;
  double pointwise_bound = 0.0;
};

/// Closed-form score vector anchored at instance 0: half the log-odds
/// difference for exponential loss, the full log-odds difference for
/// logistic. Each pair difference then minimizes its conditional risk.
inline ScoreVector attainment_scores(const DiscreteDistribution& d, const SurrogateLoss& phi) {
  double factor = 0.0;
  if (phi.kind() == LossKind::exponential) {
    factor = 0.5;
  } else if (phi.kind() == LossKind::logistic) {
    factor = 1.0;
  } else {
    throw std::invalid_argument("pointwise attainment holds only for exp and logistic, not " + phi.name());
  }
  for (double e : d.eta()) {
    if (e <= 0.0 || e >= 1.0) throw std::invalid_argument("pointwise attainment needs every eta in (0,1)");
  }
  const double e0 = d.eta(0);
  std::vector<double> f(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = d.eta(i);
    f[i] = factor * std::log(e * (1.0 - e0) / (e0 * (1.0 - e)));
  }
  return ScoreVector(std::move(f));
}

inline AttainmentReport pointwise_attainment(const DiscreteDistribution& d, const SurrogateLoss& phi) {
  AttainmentReport r{attainment_scores(d, phi), 0.0, 0.0};
  r.constructed_risk = phi_risk(d, r.scores, phi);
  r.pointwise_bound = pointwise_risk_bound(d, phi);
  return r;
}

struct NecessityWitness {
  bool found = false;
  /// H^- - H at (eta0, eta0').
  double margin = 0.0;
  /// Wrong-direction difference attaining H (<= 0); meaningful when found.
  double alpha0 = 0.0;
  /// R(f<n>) - R* for the constant-gap sequence f1 = f2 + alpha0.
  double auc_regret = 0.0;
  /// p(1-p) (R(f<n>) - R*), the unnormalized pair expectation.
  double unnormalized_regret = 0.0;
  /// R_phi(f<n>) - R_phi*, R_phi* taken as the pointwise bound (exact on two points).
  double sequence_phi_regret = 0.0;
};

/// Two-point, half/half construction at (eta0 > eta0'). If a wrong-direction
/// alpha0 attains H, the constant sequence with gap alpha0 drives R_phi to its
/// infimum while the AUC regret stays positive.
template <PairwiseLoss L>
NecessityWitness necessity_witness(double eta0, double eta0_prime, const L& phi, double tol = kCalibrationTolerance) {
  if (!(eta0 > eta0_prime)) throw std::invalid_argument("necessity witness needs eta0 > eta0'");
  const auto d = DiscreteDistribution::uniform({eta0, eta0_prime});
  const double p = d.positive_rate();
  const double h = optimal_conditional_risk(eta0, eta0_prime, phi, p).value;
  const ConditionalOptimum restricted = detail::conditional_minimum(eta0, eta0_prime, phi, p, -kDefaultRadius, 0.0,
                                                                    kDefaultRadius);
  NecessityWitness w;
  w.margin = restricted.value - h;
  if (w.margin > tol) return w;
  w.found = true;
  w.alpha0 = restricted.alpha;
  const ScoreVector f({restricted.alpha, 0.0});
  w.auc_regret = auc_risk(d, f) - bayes_risk(d);
  w.unnormalized_regret = p * (1.0 - p) * w.auc_regret;
  w.sequence_phi_regret = phi_risk(d, f, phi) - pointwise_risk_bound(d, phi);
  return w;
}

}  // namespace auclab
