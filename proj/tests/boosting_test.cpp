#include <cmath>
#include <random>
#include <stdexcept>

#include "auclab/boosting.hpp"
#include "gtest/gtest.h"

namespace auclab {
namespace {

LabeledSample sample(Generator g, std::size_t n, std::uint64_t seed, std::size_t dim = 2) {
  std::mt19937_64 rng(seed);
  return generate_sample(rng, n, {g, dim, 1.0});
}

// O(n^2) pair count, independent of the sorted sweep.
double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != -1) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

TEST(SampleTest, validation) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(generate_sample(rng, 1), std::invalid_argument);
  EXPECT_THROW(LabeledSample({{1.0}, {2.0}}, {1, 1}), std::invalid_argument);
  EXPECT_THROW(LabeledSample({{1.0}, {2.0}}, {1, 0}), std::invalid_argument);
  EXPECT_THROW(LabeledSample({{1.0}, {2.0, 3.0}}, {1, -1}), std::invalid_argument);
  EXPECT_THROW(LabeledSample({{}, {}}, {1, -1}), std::invalid_argument);
}

TEST(EmpiricalAucTest, matches_pair_count) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> level(0, 5);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> s(40);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = level(rng);
      y[i] = i % 3 == 0 ? 1 : -1;
    }
    EXPECT_NEAR(empirical_auc(s, y), brute_auc(s, y), 1e-14);
  }
}

TEST(AdaBoostTest, separable_sample_fits_exactly) {
  const auto s = sample(Generator::separable, 60, 3, 1);
  const auto r = train_adaboost(s, 50);
  EXPECT_EQ(empirical_accuracy(r.ensemble.scores(s), s.labels()), 1.0);
  EXPECT_EQ(empirical_auc(r.ensemble, s), 1.0);
}

TEST(AdaBoostTest, loss_trace_non_increasing) {
  const auto s = sample(Generator::gaussian, 300, 4);
  const auto r = train_adaboost(s, 80);
  ASSERT_EQ(r.loss_trace.size(), r.ensemble.rounds() + 1);
  for (std::size_t t = 1; t < r.loss_trace.size(); ++t) {
    EXPECT_LE(r.loss_trace[t], r.loss_trace[t - 1] * (1.0 + 1e-12));
  }
  EXPECT_GE(empirical_auc(r.ensemble, s), 0.5 - 0.02);
}

TEST(AdaBoostTest, rejects_zero_rounds) {
  EXPECT_THROW(train_adaboost(sample(Generator::gaussian, 10, 5), 0), std::invalid_argument);
}

TEST(RankBoostTest, separable_sample_ranks_perfectly) {
  const auto s = sample(Generator::separable, 60, 6, 1);
  const auto r = train_rankboost(s, 50);
  EXPECT_EQ(empirical_auc(r.ensemble, s), 1.0);
}

TEST(RankBoostTest, constant_feature_is_degenerate) {
  const LabeledSample s({{1.0}, {1.0}, {1.0}, {1.0}}, {1, -1, 1, -1});
  const auto r = train_rankboost(s, 10);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.ensemble.rounds(), 0u);
  EXPECT_EQ(empirical_auc(r.ensemble, s), 0.5);
  EXPECT_EQ(train_adaboost(s, 10).ensemble.rounds(), 0u);
}

TEST(RankBoostTest, loss_trace_non_increasing) {
  const auto s = sample(Generator::gaussian, 300, 7);
  const auto r = train_rankboost(s, 80);
  for (std::size_t t = 1; t < r.loss_trace.size(); ++t) {
    EXPECT_LE(r.loss_trace[t], r.loss_trace[t - 1] * (1.0 + 1e-12));
  }
  EXPECT_GE(empirical_auc(r.ensemble, s), 0.5 - 0.02);
}

TEST(RankBoostTest, pairwise_loss_matches_pair_sum) {
  const auto s = sample(Generator::gaussian, 80, 8);
  const auto r = train_rankboost(s, 15);
  const auto f = r.ensemble.scores(s);
  double total = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s.y(i) != 1 || s.y(j) != -1) continue;
      total += std::exp(-(f[i] - f[j]));
      pairs += 1.0;
    }
  }
  EXPECT_NEAR(r.loss_trace.back(), total / pairs, 1e-12 * total / pairs);
}

TEST(BoostingTest, identical_seeds_give_identical_ensembles) {
  const auto a = train_rankboost(sample(Generator::gaussian, 200, 9), 30);
  const auto b = train_rankboost(sample(Generator::gaussian, 200, 9), 30);
  ASSERT_EQ(a.ensemble.rounds(), b.ensemble.rounds());
  for (std::size_t t = 0; t < a.ensemble.rounds(); ++t) {
    EXPECT_EQ(a.ensemble.stumps[t].feature, b.ensemble.stumps[t].feature);
    EXPECT_EQ(a.ensemble.stumps[t].threshold, b.ensemble.stumps[t].threshold);
    EXPECT_EQ(a.ensemble.stumps[t].weight, b.ensemble.stumps[t].weight);
  }
}

TEST(ThresholdTest, plugin_formula) {
  const std::vector<double> f{1.0, 2.0, -1.0, 0.5};
  const std::vector<int> y{1, 1, -1, -1};
  const double expected = 0.5 * std::log(std::exp(-1.0) + std::exp(0.5)) - 0.5 * std::log(std::exp(-1.0) + std::exp(-2.0));
  EXPECT_NEAR(plugin_threshold(f, y), expected, 1e-14);
  // Shifting scores shifts the threshold by the same amount.
  std::vector<double> g = f;
  for (double& v : g) v += 3.0;
  EXPECT_NEAR(plugin_threshold(g, y), expected + 3.0, 1e-12);
}

TEST(ThresholdTest, best_accuracy_threshold_separates) {
  const std::vector<double> f{3.0, 2.0, -1.0, 0.5};
  const std::vector<int> y{1, 1, -1, -1};
  EXPECT_EQ(empirical_accuracy(f, y, best_accuracy_threshold(f, y)), 1.0);
}

TEST(EquivalenceTest, separable_generator_gives_perfect_auc) {
  EquivalenceConfig cfg;
  cfg.sizes = {100, 400};
  cfg.trials = 3;
  cfg.rounds = 30;
  cfg.test_size = 500;
  cfg.generator.kind = Generator::separable;
  const auto rep = equivalence_experiment(cfg);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.auc_ada, 1.0);
    EXPECT_EQ(r.auc_rank, 1.0);
  }
}

TEST(EquivalenceTest, identical_generator_is_chance) {
  EquivalenceConfig cfg;
  cfg.sizes = {2000};
  cfg.trials = 3;
  cfg.rounds = 20;
  cfg.test_size = 4000;
  cfg.generator.kind = Generator::identical;
  const auto rep = equivalence_experiment(cfg);
  for (const auto& r : rep.rows) {
    EXPECT_NEAR(r.auc_ada, 0.5, 0.05);
    EXPECT_NEAR(r.auc_rank, 0.5, 0.05);
  }
}

TEST(EquivalenceTest, rows_ordered_and_seeded) {
  EquivalenceConfig cfg;
  cfg.sizes = {50, 100};
  cfg.trials = 4;
  cfg.rounds = 10;
  cfg.test_size = 200;
  cfg.seed = 77;
  const auto rep = equivalence_experiment(cfg);
  ASSERT_EQ(rep.rows.size(), 8u);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    EXPECT_EQ(rep.rows[i].size, cfg.sizes[i / 4]);
    EXPECT_EQ(rep.rows[i].trial, i % 4);
    EXPECT_EQ(rep.rows[i].seed, trial_seed(77, i));
  }
}

TEST(MedianTest, values) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

}  // namespace
}  // namespace auclab
