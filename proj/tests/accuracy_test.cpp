#include <cmath>
#include <random>

#include "auclab/accuracy.hpp"
#include "gtest/gtest.h"

namespace auclab {
namespace {

// Nested-grid search for the stationary point of t -> R_phi_acc(f - t): scan
// |d/dt| on a grid, zoom in around the best cell, repeat until the step is
// below 1e-11. The derivative has a sharp zero where the risk itself is flat.
double grid_threshold(const DiscreteDistribution& d, const ScoreVector& f) {
  auto slope = [&](double t) {
    double g = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      g += d.marginal(i) * (d.eta(i) * std::exp(t - f[i]) - (1.0 - d.eta(i)) * std::exp(f[i] - t));
    }
    return std::abs(g);
  };
  double lo = -20.0;
  double hi = 20.0;
  double best = 0.0;
  for (double step = 0.01; step > 1e-11; step /= 20.0) {
    double best_value = INFINITY;
    for (double t = lo; t <= hi; t += step) {
      const double v = slope(t);
      if (v < best_value) {
        best_value = v;
        best = t;
      }
    }
    lo = best - step;
    hi = best + step;
  }
  return best;
}

TEST(AccuracyRiskTest, examples) {
  const auto d = DiscreteDistribution({0.25, 0.25, 0.5}, {0.2, 0.7, 0.4});
  std::vector<double> aligned;
  for (double e : d.eta()) aligned.push_back(2.0 * e - 1.0);
  EXPECT_NEAR(accuracy_risk(d, ScoreVector(aligned)), 0.25 * 0.2 + 0.25 * 0.3 + 0.5 * 0.4, 1e-15);
  EXPECT_NEAR(bayes_accuracy_risk(d), 0.25 * 0.2 + 0.25 * 0.3 + 0.5 * 0.4, 1e-15);

  const auto pos = DiscreteDistribution::uniform({0.8, 0.8});
  EXPECT_NEAR(accuracy_risk(pos, ScoreVector::constant(2, -1.0)), 0.8, 1e-15);
  EXPECT_EQ(accuracy_risk(pos, ScoreVector::constant(2, 0.0)), 0.0);
}

TEST(PhiAccRiskTest, examples) {
  const auto d = DiscreteDistribution::uniform({0.2, 0.8});
  EXPECT_NEAR(phi_acc_risk(d, ScoreVector::constant(2, 0.0)), 1.0, 1e-15);
  EXPECT_NEAR(optimal_phi_acc_risk(DiscreteDistribution::uniform({0.5, 0.5})), 1.0, 1e-15);
  EXPECT_NEAR(optimal_phi_acc_risk(d), 0.8, 1e-15);
  const ScoreVector half_logit({0.5 * std::log(0.25), 0.5 * std::log(4.0)});
  EXPECT_NEAR(phi_acc_risk(d, half_logit), 0.8, 1e-12);
  EXPECT_FALSE(phi_acc_optimum_attained(DiscreteDistribution::uniform({0.0, 0.5})));
}

TEST(ThresholdTest, examples) {
  EXPECT_EQ(optimal_threshold(DiscreteDistribution::uniform({0.5, 0.5}), ScoreVector::constant(2, 0.0)), 0.0);
  const auto d = DiscreteDistribution::uniform({0.2, 0.8});
  const ScoreVector f({0.0, std::log(4.0)});
  EXPECT_NEAR(optimal_threshold(d, f), grid_threshold(d, f), 1e-8);
  EXPECT_NEAR(optimal_threshold(d, f.shifted(1.7)), optimal_threshold(d, f) + 1.7, 1e-12);
}

TEST(ThresholdProperty, beats_every_grid_neighbor) {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 300; ++k) {
    const auto d = sample_distribution(rng, {2, 6, 0.05, 0.95});
    const auto f = sample_scores(rng, d.size());
    const double t = optimal_threshold(d, f);
    const double at = phi_acc_risk(d, f.shifted(-t));
    for (int i = 0; i <= 40; ++i) {
      const double s = t - 2.0 + 0.1 * i;
      EXPECT_LE(at, phi_acc_risk(d, f.shifted(-s)) + 1e-14);
    }
    if (k < 30) {
      EXPECT_NEAR(t, grid_threshold(d, f), 1e-8);
    }
  }
}

TEST(AccuracyProperty, closed_forms) {
  std::mt19937_64 rng(59);
  const auto exp = SurrogateLoss::exponential();
  for (int k = 0; k < 300; ++k) {
    const auto d = sample_distribution(rng, {2, 6, 0.05, 0.95});
    const auto f = sample_scores(rng, d.size());
    EXPECT_GE(accuracy_risk(d, f), bayes_accuracy_risk(d) - 1e-12);

    double a = 0.0;
    double b = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      a += d.marginal(i) * d.eta(i) * std::exp(-f[i]);
      b += d.marginal(i) * (1.0 - d.eta(i)) * std::exp(f[i]);
      s += d.marginal(i) * std::sqrt(d.eta(i) * (1.0 - d.eta(i)));
    }
    const double p = d.positive_rate();
    const double phi_regret = phi_risk(d, f, exp) - exponential_optimal_phi_risk(d);
    EXPECT_NEAR(2.0 * p * (1.0 - p) * phi_regret, 2.0 * a * b - 2.0 * s * s, 1e-10);
    EXPECT_NEAR(phi_acc_risk(d, f.shifted(-optimal_threshold(d, f))), 2.0 * std::sqrt(a * b), 1e-12);
  }
}

TEST(AccuracyProperty, squared_difference_fact) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 100000; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const double lhs = (a * b - c * d) * (a * b - c * d);
    const double rhs = a * a * (b - d) * (b - d) + d * d * (a - c) * (a - c);
    // ab - cd = a(b - d) + d(a - c), so the bound needs a nonpositive cross term.
    if (a * d * (a - c) * (b - d) <= 0.0) {
      EXPECT_LE(lhs, rhs + 1e-9 * (1.0 + rhs));
    }
  }
}

TEST(ChainTest, simultaneous_optimum) {
  const auto d = DiscreteDistribution({0.3, 0.3, 0.4}, {0.2, 0.6, 0.9});
  std::vector<double> f;
  for (double e : d.eta()) f.push_back(0.5 * std::log(e / (1.0 - e)));
  for (const auto& c : chain_checks(d, ScoreVector(f))) {
    EXPECT_NEAR(c.lhs, 0.0, 1e-9) << c.id;
    EXPECT_TRUE(c.holds()) << c.id;
  }
}

TEST(ChainTest, anti_bayes_two_point) {
  const auto d = DiscreteDistribution::uniform({0.2, 0.8});
  const ScoreVector f({0.5 * std::log(4.0), -0.5 * std::log(4.0)});
  const auto checks = chain_checks(d, f);
  EXPECT_GT(checks[0].slack, 0.0);
  EXPECT_GT(checks[0].lhs, 0.0);
}

TEST(ChainTest, constant_scores) {
  const auto d = DiscreteDistribution::uniform({0.2, 0.8});
  for (const auto& c : chain_checks(d, ScoreVector::constant(2, 0.3))) EXPECT_TRUE(c.holds()) << c.id;
}

TEST(ChainProperty, suites_have_no_violations) {
  const auto t9 = verify_acc_to_auc(300, 3);
  const auto t10 = verify_auc_to_acc(300, 3);
  const auto all = verify_combined_chain(300, 3);
  EXPECT_EQ(t9.size(), 300u);
  EXPECT_EQ(all.size(), 300u * chain_ids().size());
  EXPECT_EQ(count_violations(t9), 0u);
  EXPECT_EQ(count_violations(t10), 0u);
  EXPECT_EQ(count_violations(all), 0u);
  for (const auto& c : all) EXPECT_GE(c.slack, kSlackFloor) << c.id;
}

}  // namespace
}  // namespace auclab
