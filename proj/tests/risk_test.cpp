#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "auclab/optimizer.hpp"
#include "auclab/risk.hpp"
#include "auclab/trials.hpp"
#include "gtest/gtest.h"

namespace auclab {
namespace {

const DiscreteDistribution& fixture() {
  static const auto d = DiscreteDistribution::uniform({0.4, 0.45, 0.55});
  return d;
}

// Pairwise-comparison oracle for R: counts misordered positive/negative mass
// directly from the conditional definition without the symmetric sum.
double auc_risk_oracle(const DiscreteDistribution& d, const ScoreVector& f) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double w = d.marginal(i) * d.marginal(j) * d.eta(i) * (1.0 - d.eta(j));
      den += w;
      if (f[i] < f[j]) num += w;
      if (f[i] == f[j]) num += 0.5 * w;
    }
  }
  return num / den;
}

TEST(RankingLossTest, values) {
  EXPECT_EQ(ranking_loss(0.0), 0.5);
  EXPECT_EQ(ranking_loss(3.2), 0.0);
  EXPECT_EQ(ranking_loss(-0.001), 1.0);
}

// The quoted 0.433037 matches the exact 0.4330357... to five decimals.
TEST(AucRiskTest, fixture_values) {
  EXPECT_NEAR(auc_risk(fixture(), ScoreVector({0.0, 1.0, 2.0})), 0.433037, 5e-6);
  EXPECT_NEAR(auc_risk(fixture(), ScoreVector({0.0, 1.0, 2.0})), 0.97 / 9.0 / (7.0 / 15.0 * 8.0 / 15.0), 1e-14);
  EXPECT_NEAR(bayes_risk(fixture()), 0.97 / 9.0 / (7.0 / 15.0 * 8.0 / 15.0), 1e-14);
  EXPECT_DOUBLE_EQ(auc_risk(fixture(), ScoreVector::constant(3, 4.0)), 0.5);
}

TEST(AucRiskTest, constant_eta_makes_risk_score_independent) {
  const auto d = DiscreteDistribution({0.2, 0.3, 0.5}, {0.3, 0.3, 0.3});
  EXPECT_NEAR(auc_risk(d, ScoreVector({3.0, -1.0, 0.5})), 0.5, 1e-14);
  EXPECT_NEAR(bayes_risk(d), 0.5, 1e-14);
}

TEST(AucRiskTest, realizable_bayes_risk_is_zero) {
  EXPECT_EQ(bayes_risk(DiscreteDistribution({0.2, 0.3, 0.5}, {1.0, 0.0, 1.0})), 0.0);
}

TEST(AucRiskTest, incompatible_lengths_rejected) {
  EXPECT_THROW(auc_risk(fixture(), ScoreVector({0.0, 1.0})), std::invalid_argument);
}

TEST(AucRiskProperty, matches_oracle_and_auc_identity) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 500; ++k) {
    const auto d = sample_distribution(rng);
    auto f = sample_scores(rng, d.size());
    // Force a tie now and then.
    if (k % 3 == 0 && d.size() > 1) {
      std::vector<double> v(f.values().begin(), f.values().end());
      v[1] = v[0];
      f = ScoreVector(v);
    }
    EXPECT_NEAR(auc_risk(d, f), auc_risk_oracle(d, f), 1e-12);
    EXPECT_NEAR(auc_risk(d, f) + auc(d, f), 1.0, 1e-12);
  }
}

TEST(AucRiskProperty, bayes_optimality) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const auto d = sample_distribution(rng);
    const auto f = sample_scores(rng, d.size());
    EXPECT_GE(auc_risk(d, f), bayes_risk(d) - 1e-12);
  }
}

TEST(AucRiskProperty, translation_and_monotone_invariance) {
  std::mt19937_64 rng(3);
  const auto phi = SurrogateLoss::logistic();
  for (int k = 0; k < 200; ++k) {
    const auto d = sample_distribution(rng);
    const auto f = sample_scores(rng, d.size());
    EXPECT_NEAR(auc_risk(d, f.shifted(2.5)), auc_risk(d, f), 1e-12);
    EXPECT_NEAR(phi_risk(d, f.shifted(-1.75), phi), phi_risk(d, f, phi), 1e-12);
    std::vector<double> cube;
    std::vector<double> expo;
    for (double v : f.values()) {
      cube.push_back(v * v * v);
      expo.push_back(std::exp(v));
    }
    EXPECT_EQ(auc_risk(d, ScoreVector(cube)), auc_risk(d, f));
    EXPECT_EQ(auc_risk(d, ScoreVector(expo)), auc_risk(d, f));
  }
}

TEST(PhiRiskTest, constant_scores_give_phi_of_zero) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const auto d = sample_distribution(rng);
    EXPECT_NEAR(phi_risk(d, ScoreVector::constant(d.size(), 1.3), SurrogateLoss::exponential()), 1.0, 1e-12);
    EXPECT_NEAR(phi_risk(d, ScoreVector::constant(d.size(), -0.2), SurrogateLoss::logistic()), std::log(2.0), 1e-12);
  }
}

TEST(PhiRiskProperty, bounded_below_by_pointwise_bound) {
  std::mt19937_64 rng(13);
  for (const auto& phi : SurrogateLoss::catalogue()) {
    for (int k = 0; k < 40; ++k) {
      const auto d = sample_distribution(rng);
      const auto f = sample_scores(rng, d.size());
      EXPECT_GE(phi_risk(d, f, phi), pointwise_risk_bound(d, phi) - 1e-12) << phi.name();
    }
  }
}

TEST(PhiRiskProperty, gradient_matches_central_differences) {
  std::mt19937_64 rng(17);
  for (const auto& phi : SurrogateLoss::catalogue()) {
    if (!phi.is_differentiable()) continue;
    for (int k = 0; k < 100; ++k) {
      const auto d = sample_distribution(rng);
      const auto f = sample_scores(rng, d.size());
      const auto g = phi_risk_gradient(d, f, phi);
      for (std::size_t i = 0; i < d.size(); ++i) {
        std::vector<double> up(f.values().begin(), f.values().end());
        std::vector<double> down = up;
        const double h = 1e-6;
        up[i] += h;
        down[i] -= h;
        const double fd = (phi_risk(d, ScoreVector(up), phi) - phi_risk(d, ScoreVector(down), phi)) / (2.0 * h);
        EXPECT_LE(std::abs(fd - g[i]), 1e-5 * std::max(1.0, std::abs(g[i]))) << phi.name();
      }
    }
  }
}

TEST(ConditionalRiskTest, exponential_values) {
  const auto exp = SurrogateLoss::exponential();
  EXPECT_NEAR(conditional_phi_risk(0.8, 0.2, std::log(4.0), exp, 0.5), 0.64, 1e-14);
  const auto h = optimal_conditional_risk(0.8, 0.2, exp, 0.5);
  EXPECT_NEAR(h.value, 0.64, 1e-12);
  EXPECT_NEAR(h.alpha, 0.5 * std::log(16.0), 1e-6);
  EXPECT_FALSE(h.unattained);
  EXPECT_NEAR(restricted_conditional_risk(0.8, 0.2, exp, 0.5), 1.36, 1e-12);
}

TEST(ConditionalRiskTest, hinge_values) {
  const auto hinge = SurrogateLoss::hinge();
  EXPECT_EQ(conditional_phi_risk(0.0, 1.0, -1.0, hinge, 0.3), 0.0);
  EXPECT_NEAR(restricted_conditional_risk(0.8, 0.2, hinge, 0.5), 1.36, 1e-12);
  EXPECT_GT(restricted_conditional_risk(0.8, 0.2, hinge, 0.5), optimal_conditional_risk(0.8, 0.2, hinge, 0.5).value);
}

TEST(ConditionalRiskTest, equal_eta_optimum_at_zero) {
  for (const auto& phi : SurrogateLoss::catalogue()) {
    const auto h = optimal_conditional_risk(0.3, 0.3, phi, 0.4);
    EXPECT_NEAR(h.value, conditional_phi_risk(0.3, 0.3, 0.0, phi, 0.4), 1e-12) << phi.name();
    EXPECT_EQ(restricted_conditional_risk(0.3, 0.3, phi, 0.4), h.value);
    for (double a : {-2.0, -0.5, 0.5, 2.0}) EXPECT_LE(h.value, conditional_phi_risk(0.3, 0.3, a, phi, 0.4) + 1e-15);
  }
}

TEST(ConditionalRiskTest, unattained_infimum_flagged) {
  const auto h = optimal_conditional_risk(1.0, 0.5, SurrogateLoss::exponential(), 0.5);
  EXPECT_TRUE(h.unattained);
  EXPECT_LT(h.value, 1e-12);
}

TEST(OptimizerTest, exponential_two_point_difference) {
  const auto d = DiscreteDistribution::uniform({0.2, 0.8});
  const auto r = minimize_phi_risk(d, SurrogateLoss::exponential());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.gradient_norm, 1e-9);
  EXPECT_NEAR(r.minimizer[1] - r.minimizer[0], std::log(4.0), 1e-8);
  EXPECT_NEAR(r.value, phi_risk(d, r.minimizer, SurrogateLoss::exponential()), 1e-9);
}

TEST(OptimizerTest, hinge_counterexample_minimizer_shape) {
  const auto r = minimize_phi_risk(fixture(), SurrogateLoss::hinge());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.minimizer[0], r.minimizer[1]);
  EXPECT_EQ(r.minimizer[2] - r.minimizer[1], 1.0);
}

TEST(OptimizerTest, equal_eta_constant_optimal) {
  const auto d = DiscreteDistribution::uniform({0.3, 0.3});
  for (const auto& phi : SurrogateLoss::catalogue()) {
    const auto r = minimize_phi_risk(d, phi);
    EXPECT_NEAR(r.value, phi.value(0.0), 1e-9) << phi.name();
  }
}

TEST(OptimizerTest, unattained_flag_on_realizable_input) {
  const auto d = DiscreteDistribution::uniform({1.0, 0.0});
  const auto r = minimize_phi_risk(d, SurrogateLoss::exponential());
  EXPECT_TRUE(r.infimum_unattained);
}

TEST(OptimizerTest, non_convergence_reported) {
  OptimizerConfig cfg;
  cfg.max_iters = 2;
  const auto r = minimize_phi_risk(fixture(), SurrogateLoss::logistic(), cfg);
  EXPECT_FALSE(r.converged);
  cfg.max_iters = 0;
  EXPECT_THROW(minimize_phi_risk(fixture(), SurrogateLoss::logistic(), cfg), std::invalid_argument);
}

TEST(OptimizerTest, trace_observer_sees_every_iteration) {
  std::size_t calls = 0;
  const auto r = minimize_phi_risk(fixture(), SurrogateLoss::exponential(), {},
                                   [&](std::size_t, const std::vector<double>&, double) { ++calls; });
  EXPECT_EQ(calls, r.iterations + 1);
}

TEST(GridOracleTest, exponential_two_point) {
  const auto d = DiscreteDistribution::uniform({0.2, 0.8});
  const auto g = grid_oracle_min_phi_risk(d, SurrogateLoss::exponential(), GridSpec{-3.0, 3.0, 0.001});
  EXPECT_NEAR(g.argmin[1], std::log(4.0), 1e-3);
}

TEST(GridOracleTest, rejects_bad_inputs) {
  EXPECT_THROW(grid_oracle_min_phi_risk(DiscreteDistribution::uniform({0.1, 0.2, 0.3, 0.4, 0.5}),
                                        SurrogateLoss::exponential(), GridSpec{}),
               std::invalid_argument);
  EXPECT_THROW(grid_oracle_min_phi_risk(fixture(), SurrogateLoss::exponential(), GridSpec{1.0, 0.0, 0.1}),
               std::invalid_argument);
  EXPECT_THROW(grid_oracle_min_phi_risk(fixture(), SurrogateLoss::exponential(), GridSpec{0.0, 1.0, 0.0}),
               std::invalid_argument);
}

TEST(GridOracleProperty, optimizer_within_resolution_bound) {
  std::mt19937_64 rng(19);
  const GridSpec grid{-6.0, 6.0, 0.05};
  for (const auto& phi : SurrogateLoss::catalogue()) {
    for (int k = 0; k < 5; ++k) {
      const auto d = sample_distribution(rng, {3, 3, 0.05, 0.95});
      const auto r = minimize_phi_risk(d, phi);
      const auto g = grid_oracle_min_phi_risk(d, phi, grid);
      EXPECT_LE(r.value, g.value + 1e-9) << phi.name();
      EXPECT_LE(g.value - r.value, grid_resolution_bound(d, phi, grid, r.minimizer) + 1e-9) << phi.name();
    }
  }
}

}  // namespace
}  // namespace auclab
