#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "auclab/trials.hpp"

namespace auclab {

/// Finite sample with labels in {+1, -1}; every row has the same dimension.
class LabeledSample {
 public:
  LabeledSample(std::vector<std::vector<double>> features, std::vector<int> labels)
      : features_(std::move(features)), labels_(std::move(labels)) {
    if (features_.size() != labels_.size()) throw std::invalid_argument("features and labels differ in length");
    if (features_.empty()) throw std::invalid_argument("empty sample");
    dim_ = features_.front().size();
    if (dim_ == 0) throw std::invalid_argument("feature dimension must be >= 1");
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (features_[i].size() != dim_) throw std::invalid_argument("ragged feature rows");
      if (labels_[i] == 1) {
        pos = true;
      } else if (labels_[i] == -1) {
        neg = true;
      } else {
        throw std::invalid_argument("labels must be +1 or -1");
      }
    }
    if (!pos || !neg) throw std::invalid_argument("sample needs both labels");
  }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<double>& x(std::size_t i) const { return features_[i]; }
  int y(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

 private:
  std::vector<std::vector<double>> features_;
  std::vector<int> labels_;
  std::size_t dim_ = 0;
};

enum class Generator { gaussian, separable, identical };

inline std::string to_string(Generator g) {
  switch (g) {
    case Generator::gaussian:
      return "gaussian";
    case Generator::separable:
      return "separable";
    case Generator::identical:
      return "identical";
  }
  return "?";
}

inline Generator parse_generator(const std::string& s) {
  if (s == "gaussian") return Generator::gaussian;
  if (s == "separable") return Generator::separable;
  if (s == "identical") return Generator::identical;
  throw std::invalid_argument("unknown generator '" + s + "'");
}

struct GeneratorParams {
  Generator kind = Generator::gaussian;
  std::size_t dim = 2;
  /// Distance between class means along each axis (gaussian only).
  double separation = 1.0;
};

/// Labels alternate +1, -1 so both classes are present for n >= 2.
/// gaussian: N(+-separation/2, I); separable: first feature in [1,2] for
/// positives and [-2,-1] for negatives; identical: N(0, I) for both.
inline LabeledSample generate_sample(std::mt19937_64& rng, std::size_t n, const GeneratorParams& params = {}) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  std::vector<std::vector<double>> x(n, std::vector<double>(params.dim));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 2 == 0 ? 1 : -1;
    for (std::size_t k = 0; k < params.dim; ++k) {
      switch (params.kind) {
        case Generator::gaussian:
          x[i][k] = z(rng) + 0.5 * params.separation * y[i];
          break;
        case Generator::separable:
          x[i][k] = k == 0 ? y[i] * u(rng) : z(rng);
          break;
        case Generator::identical:
          x[i][k] = z(rng);
          break;
      }
    }
  }
  return LabeledSample(std::move(x), std::move(y));
}

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double weight = 0.0;

  double output(const std::vector<double>& x) const { return x[feature] > threshold ? polarity : -polarity; }
};

struct StumpEnsemble {
  std::vector<Stump> stumps;

  std::size_t rounds() const noexcept { return stumps.size(); }
  double score(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& st : stumps) s += st.weight * st.output(x);
    return s;
  }
  std::vector<double> scores(const LabeledSample& s) const {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = score(s.x(i));
    return out;
  }
};

struct TrainingResult {
  StumpEnsemble ensemble;
  /// Training surrogate loss before round 1 and after each round.
  std::vector<double> loss_trace;
  bool stopped_early = false;
};

/// Weight given to a stump that makes no weighted mistakes.
inline const double kMaxStumpWeight = 0.5 * std::log(1e8);

namespace detail {

// Per feature: instance order by value and the split points between
// consecutive distinct values.
struct SortedFeature {
  std::vector<std::size_t> order;
  std::vector<std::size_t> cut_after;  // positions k where value[k] < value[k+1]
};

inline std::vector<SortedFeature> presort(const LabeledSample& s) {
  std::vector<SortedFeature> out(s.dim());
  for (std::size_t k = 0; k < s.dim(); ++k) {
    auto& sf = out[k];
    sf.order.resize(s.size());
    std::iota(sf.order.begin(), sf.order.end(), std::size_t{0});
    std::stable_sort(sf.order.begin(), sf.order.end(),
                     [&](std::size_t a, std::size_t b) { return s.x(a)[k] < s.x(b)[k]; });
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s.x(sf.order[i])[k] < s.x(sf.order[i + 1])[k]) sf.cut_after.push_back(i);
    }
  }
  return out;
}

inline double midpoint(const LabeledSample& s, const SortedFeature& sf, std::size_t feature, std::size_t cut) {
  return 0.5 * (s.x(sf.order[cut])[feature] + s.x(sf.order[cut + 1])[feature]);
}

inline double exp_loss(const LabeledSample& s, const std::vector<double>& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += std::exp(-s.y(i) * f[i]);
  return total / static_cast<double>(s.size());
}

inline double pairwise_exp_loss(const LabeledSample& s, const std::vector<double>& f) {
  // The pair sum factorizes: mean over positives of e^{-f} times mean over
  // negatives of e^{f}.
  double pos = 0.0;
  double neg = 0.0;
  std::size_t np = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.y(i) == 1) {
      pos += std::exp(-f[i]);
      ++np;
    } else {
      neg += std::exp(f[i]);
    }
  }
  return pos / static_cast<double>(np) * neg / static_cast<double>(s.size() - np);
}

inline void apply(const LabeledSample& s, const Stump& st, std::vector<double>& f) {
  for (std::size_t i = 0; i < s.size(); ++i) f[i] += st.weight * st.output(s.x(i));
}

}  // namespace detail

/// Discrete AdaBoost over exhaustive midpoint stumps: each round picks the
/// stump with the largest weighted edge and steps alpha = ln((1-e)/e)/2.
/// A zero-error stump gets kMaxStumpWeight; an edge of zero ends training.
inline TrainingResult train_adaboost(const LabeledSample& s, std::size_t rounds) {
  if (rounds == 0) throw std::invalid_argument("rounds must be >= 1");
  const auto sorted = detail::presort(s);
  const std::size_t n = s.size();
  std::vector<double> f(n, 0.0);
  std::vector<double> w(n);
  TrainingResult out;
  out.loss_trace.push_back(detail::exp_loss(s, f));
  for (std::size_t t = 0; t < rounds; ++t) {
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) shift = std::max(shift, -s.y(i) * f[i]);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += w[i] = std::exp(-s.y(i) * f[i] - shift);
    double signed_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) signed_total += (w[i] /= total) * s.y(i);

    // Edge of "+1 above the cut" is signed_total - 2 * (signed weight at or below).
    double best_edge = 0.0;
    Stump best;
    for (std::size_t k = 0; k < s.dim(); ++k) {
      const auto& sf = sorted[k];
      double below = 0.0;
      std::size_t pos = 0;
      for (std::size_t cut : sf.cut_after) {
        for (; pos <= cut; ++pos) below += w[sf.order[pos]] * s.y(sf.order[pos]);
        const double edge = signed_total - 2.0 * below;
        if (std::abs(edge) > std::abs(best_edge)) {
          best_edge = edge;
          best = {k, detail::midpoint(s, sf, k, cut), edge > 0.0 ? 1 : -1, 0.0};
        }
      }
    }
    const double err = 0.5 * (1.0 - std::abs(best_edge));
    if (std::abs(best_edge) <= 1e-12) {
      out.stopped_early = true;
      break;
    }
    best.weight = err <= 0.0 ? kMaxStumpWeight : std::min(kMaxStumpWeight, 0.5 * std::log((1.0 - err) / err));
    detail::apply(s, best, f);
    out.ensemble.stumps.push_back(best);
    out.loss_trace.push_back(detail::exp_loss(s, f));
  }
  return out;
}

/// RankBoost over the same stumps. Pair weights factor as u_i v_j with
/// u = e^{-f} on positives and v = e^{f} on negatives; for a stump, C and D
/// are the weights of pairs it orders correctly and incorrectly, the exact
/// coordinate step is alpha = ln(C/D)/4 and the normalizer is
/// 1 - C - D + 2 sqrt(CD). D = 0 uses kMaxStumpWeight; C = D ends training.
inline TrainingResult train_rankboost(const LabeledSample& s, std::size_t rounds) {
  if (rounds == 0) throw std::invalid_argument("rounds must be >= 1");
  const auto sorted = detail::presort(s);
  const std::size_t n = s.size();
  std::vector<double> f(n, 0.0);
  std::vector<double> u(n, 0.0);
  std::vector<double> v(n, 0.0);
  TrainingResult out;
  out.loss_trace.push_back(detail::pairwise_exp_loss(s, f));
  for (std::size_t t = 0; t < rounds; ++t) {
    double shift_pos = -std::numeric_limits<double>::infinity();
    double shift_neg = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (s.y(i) == 1) {
        shift_pos = std::max(shift_pos, -f[i]);
      } else {
        shift_neg = std::max(shift_neg, f[i]);
      }
    }
    double total_u = 0.0;
    double total_v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = s.y(i) == 1 ? std::exp(-f[i] - shift_pos) : 0.0;
      v[i] = s.y(i) == -1 ? std::exp(f[i] - shift_neg) : 0.0;
      total_u += u[i];
      total_v += v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      u[i] /= total_u;
      v[i] /= total_v;
    }

    double best_z = 1.0;
    double best_c = 0.0;
    double best_d = 0.0;
    Stump best;
    bool found = false;
    for (std::size_t k = 0; k < s.dim(); ++k) {
      const auto& sf = sorted[k];
      double u_below = 0.0;
      double v_below = 0.0;
      std::size_t pos = 0;
      for (std::size_t cut : sf.cut_after) {
        for (; pos <= cut; ++pos) {
          u_below += u[sf.order[pos]];
          v_below += v[sf.order[pos]];
        }
        // Polarity +1: positives above and negatives below are ordered correctly.
        double c = (1.0 - u_below) * v_below;
        double d = u_below * (1.0 - v_below);
        int polarity = 1;
        if (d > c) {
          std::swap(c, d);
          polarity = -1;
        }
        const double z = 1.0 - c - d + 2.0 * std::sqrt(c * d);
        if (c > d * (1.0 + 1e-12) && z < best_z) {
          best_z = z;
          best_c = c;
          best_d = d;
          best = {k, detail::midpoint(s, sf, k, cut), polarity, 0.0};
          found = true;
        }
      }
    }
    if (!found) {
      out.stopped_early = true;
      break;
    }
    best.weight = best_d <= 0.0 ? kMaxStumpWeight : std::min(kMaxStumpWeight, 0.25 * std::log(best_c / best_d));
    detail::apply(s, best, f);
    out.ensemble.stumps.push_back(best);
    out.loss_trace.push_back(detail::pairwise_exp_loss(s, f));
  }
  return out;
}

/// Mann-Whitney AUC of scores against labels, ties counted half.
inline double empirical_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double neg_below = 0.0;
  double wins = 0.0;
  double np = 0.0;
  double nn = 0.0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t stop = start;
    double pos_level = 0.0;
    double neg_level = 0.0;
    while (stop < order.size() && scores[order[stop]] == scores[order[start]]) {
      (labels[order[stop]] == 1 ? pos_level : neg_level) += 1.0;
      ++stop;
    }
    wins += pos_level * (neg_below + 0.5 * neg_level);
    neg_below += neg_level;
    np += pos_level;
    nn += neg_level;
    start = stop;
  }
  if (np == 0.0 || nn == 0.0) throw std::invalid_argument("AUC needs both labels");
  return wins / (np * nn);
}

inline double empirical_auc(const StumpEnsemble& e, const LabeledSample& s) {
  return empirical_auc(e.scores(s), s.labels());
}

/// Fraction classified correctly by sign(f - t); f = t counts half.
inline double empirical_accuracy(const std::vector<double>& scores, const std::vector<int>& labels, double t = 0.0) {
  double correct = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double m = labels[i] * (scores[i] - t);
    correct += m > 0.0 ? 1.0 : (m == 0.0 ? 0.5 : 0.0);
  }
  return correct / static_cast<double>(scores.size());
}

/// Sample version of the exponential threshold: eta replaced by the label,
/// t = (ln sum_neg e^{f} - ln sum_pos e^{-f}) / 2.
inline double plugin_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
  auto log_sum_exp = [&](int label, double sign) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] == label) m = std::max(m, sign * scores[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] == label) s += std::exp(sign * scores[i] - m);
    }
    return m + std::log(s);
  };
  return 0.5 * (log_sum_exp(-1, 1.0) - log_sum_exp(1, -1.0));
}

/// Threshold with the best training accuracy among midpoints of sorted scores.
inline double best_accuracy_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<double> levels(scores);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<double> candidates{levels.front() - 1.0, levels.back() + 1.0};
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) candidates.push_back(0.5 * (levels[i] + levels[i + 1]));
  double best_t = candidates.front();
  double best_acc = -1.0;
  for (double t : candidates) {
    const double acc = empirical_accuracy(scores, labels, t);
    if (acc > best_acc) {
      best_acc = acc;
      best_t = t;
    }
  }
  return best_t;
}

struct EquivalenceConfig {
  std::vector<std::size_t> sizes{100, 1000, 10000};
  std::size_t rounds = 100;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  /// Held-out sample used to evaluate both ensembles.
  std::size_t test_size = 10000;
  GeneratorParams generator;
};

struct EquivalenceRow {
  std::size_t size = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double auc_ada = 0.0;
  double auc_rank = 0.0;
  double auc_gap = 0.0;
  double acc_ada = 0.0;
  /// RankBoost scores shifted by the plug-in threshold.
  double acc_rank = 0.0;
  double acc_gap = 0.0;
  /// RankBoost with the best training-accuracy threshold instead.
  double acc_rank_best = 0.0;
  double acc_gap_best = 0.0;
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  std::vector<double> median_auc_gap;
  std::vector<double> median_acc_gap;
  std::vector<double> median_acc_gap_best;
  /// Median AUC gap is non-increasing along the size ladder.
  bool auc_trend_ok = false;
  bool acc_trend_ok = false;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty range");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline EquivalenceRow equivalence_trial(std::size_t size, std::size_t trial, std::uint64_t seed,
                                        const EquivalenceConfig& config) {
  std::mt19937_64 rng(seed);
  const LabeledSample train = generate_sample(rng, size, config.generator);
  const LabeledSample test = generate_sample(rng, config.test_size, config.generator);
  const TrainingResult ada = train_adaboost(train, config.rounds);
  const TrainingResult rank = train_rankboost(train, config.rounds);

  EquivalenceRow r;
  r.size = size;
  r.trial = trial;
  r.seed = seed;
  const auto ada_test = ada.ensemble.scores(test);
  const auto rank_test = rank.ensemble.scores(test);
  const auto rank_train = rank.ensemble.scores(train);
  r.auc_ada = empirical_auc(ada_test, test.labels());
  r.auc_rank = empirical_auc(rank_test, test.labels());
  r.auc_gap = std::abs(r.auc_ada - r.auc_rank);
  r.acc_ada = empirical_accuracy(ada_test, test.labels());
  r.acc_rank = empirical_accuracy(rank_test, test.labels(), plugin_threshold(rank_train, train.labels()));
  r.acc_gap = std::abs(r.acc_rank - r.acc_ada);
  r.acc_rank_best = empirical_accuracy(rank_test, test.labels(), best_accuracy_threshold(rank_train, train.labels()));
  r.acc_gap_best = std::abs(r.acc_rank_best - r.acc_ada);
  return r;
}

/// Trains both algorithms on shared samples at every ladder size. Trial i
/// of size index k uses seed master ^ (k * trials + i).
inline EquivalenceReport equivalence_experiment(const EquivalenceConfig& config) {
  if (config.sizes.empty() || config.trials == 0 || config.rounds == 0 || config.test_size < 2) {
    throw std::invalid_argument("equivalence experiment needs sizes, trials, rounds and test_size >= 2");
  }
  const std::size_t total = config.sizes.size() * config.trials;
  EquivalenceReport rep;
  rep.rows = run_trials<EquivalenceRow>(total, [&](std::size_t i) {
    const std::size_t k = i / config.trials;
    return equivalence_trial(config.sizes[k], i % config.trials, trial_seed(config.seed, i), config);
  });
  for (std::size_t k = 0; k < config.sizes.size(); ++k) {
    std::vector<double> auc;
    std::vector<double> acc;
    std::vector<double> acc_best;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const auto& r = rep.rows[k * config.trials + t];
      auc.push_back(r.auc_gap);
      acc.push_back(r.acc_gap);
      acc_best.push_back(r.acc_gap_best);
    }
    rep.median_auc_gap.push_back(median(auc));
    rep.median_acc_gap.push_back(median(acc));
    rep.median_acc_gap_best.push_back(median(acc_best));
  }
  rep.auc_trend_ok = std::is_sorted(rep.median_auc_gap.rbegin(), rep.median_auc_gap.rend());
  rep.acc_trend_ok = std::is_sorted(rep.median_acc_gap.rbegin(), rep.median_acc_gap.rend());
  return rep;
}

}  // namespace auclab
