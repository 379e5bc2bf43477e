#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace auclab {

/// Tolerance on the marginal simplex constraint.
inline constexpr double kSimplexTolerance = 1e-12;

/// A finite instance space. Instance i carries a marginal probability and the
/// conditional positive-class probability eta(i) = Pr[y = +1 | x_i].
///
/// Instances are identified by index only; nothing downstream depends on
/// features. Construction validates the simplex, eta in [0,1], and the
/// standing assumption 0 < p < 1 on the positive rate.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> marginal, std::vector<double> eta)
      : marginal_(std::move(marginal)), eta_(std::move(eta)) {
    if (marginal_.empty()) {
      throw std::invalid_argument("distribution has no instances");
    }
    if (marginal_.size() != eta_.size()) {
      throw std::invalid_argument("marginal and eta have different lengths (" +
                                  std::to_string(marginal_.size()) + " vs " +
                                  std::to_string(eta_.size()) + ")");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < marginal_.size(); ++i) {
      if (!std::isfinite(marginal_[i]) || marginal_[i] < 0.0) {
        throw std::invalid_argument("marginal[" + std::to_string(i) + "] is negative or not finite");
      }
      if (!std::isfinite(eta_[i]) || eta_[i] < 0.0 || eta_[i] > 1.0) {
        throw std::invalid_argument("eta[" + std::to_string(i) + "] is outside [0,1]");
      }
      total += marginal_[i];
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      throw std::invalid_argument("marginal does not sum to 1");
    }
    positive_rate_ = 0.0;
    for (std::size_t i = 0; i < marginal_.size(); ++i) positive_rate_ += marginal_[i] * eta_[i];
    if (!(positive_rate_ > 0.0 && positive_rate_ < 1.0)) {
      throw std::invalid_argument("degenerate class distribution (positive rate must lie in (0,1))");
    }
  }

  static DiscreteDistribution uniform(std::vector<double> eta) {
    const std::size_t n = eta.size();
    if (n == 0) throw std::invalid_argument("distribution has no instances");
    return DiscreteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)), std::move(eta));
  }

  std::size_t size() const noexcept { return marginal_.size(); }
  std::span<const double> marginal() const noexcept { return marginal_; }
  std::span<const double> eta() const noexcept { return eta_; }
  double marginal(std::size_t i) const { return marginal_.at(i); }
  double eta(std::size_t i) const { return eta_.at(i); }

  /// p = sum_i marginal_i * eta_i.
  double positive_rate() const noexcept { return positive_rate_; }

  /// Every eta is 0 or 1.
  bool is_realizable() const noexcept {
    for (double e : eta_) {
      if (e * (1.0 - e) != 0.0) return false;
    }
    return true;
  }

 private:
  std::vector<double> marginal_;
  std::vector<double> eta_;
  double positive_rate_ = 0.0;
};

inline double positive_rate(const DiscreteDistribution& d) { return d.positive_rate(); }

/// One finite real score per instance.
class ScoreVector {
 public:
  ScoreVector() = default;
  explicit ScoreVector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw std::invalid_argument("score[" + std::to_string(i) + "] is not finite");
      }
    }
  }

  static ScoreVector constant(std::size_t n, double value) {
    return ScoreVector(std::vector<double>(n, value));
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// f + c, used for translation-invariance and threshold arithmetic.
  ScoreVector shifted(double c) const {
    std::vector<double> out = values_;
    for (double& v : out) v += c;
    return ScoreVector(std::move(out));
  }

 private:
  std::vector<double> values_;
};

inline void require_compatible(const DiscreteDistribution& d, const ScoreVector& f) {
  if (d.size() != f.size()) {
    throw std::invalid_argument("score vector length " + std::to_string(f.size()) +
                                " does not match instance count " + std::to_string(d.size()));
  }
}

}  // namespace auclab
