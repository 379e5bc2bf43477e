#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace auclab {

/// Anything usable as a pairwise surrogate phi: a convex function of the score
/// difference with a subgradient. The catalogue below is one model; tests
/// supply their own fixtures.
template <class L>
concept PairwiseLoss = requires(const L& loss, double t) {
  { loss.value(t) } -> std::convertible_to<double>;
  { loss.derivative(t) } -> std::convertible_to<double>;
};

enum class LossKind {
  exponential,
  logistic,
  hinge,
  absolute,
  least_square,
  least_square_hinge,
  q_norm_hinge,
  general_hinge,
  distance_weighted,
};

inline constexpr double kDefaultHingeNorm = 2.0;
inline constexpr double kDefaultEpsilon = 0.5;

/// A catalogued convex surrogate phi(t), t = f(x) - f(x').
///
/// derivative() returns the right derivative, which is the derivative itself
/// wherever phi is differentiable and the limit from above at kinks
/// (hinge at t=1 gives 0, absolute at t=1 gives +1).
class SurrogateLoss {
 public:
  static SurrogateLoss exponential() { return SurrogateLoss(LossKind::exponential, 0.0); }
  static SurrogateLoss logistic() { return SurrogateLoss(LossKind::logistic, 0.0); }
  static SurrogateLoss hinge() { return SurrogateLoss(LossKind::hinge, 0.0); }
  static SurrogateLoss absolute() { return SurrogateLoss(LossKind::absolute, 0.0); }
  static SurrogateLoss least_square() { return SurrogateLoss(LossKind::least_square, 0.0); }
  static SurrogateLoss least_square_hinge() { return SurrogateLoss(LossKind::least_square_hinge, 0.0); }

  static SurrogateLoss q_norm_hinge(double q = kDefaultHingeNorm) {
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("q-norm hinge needs q > 1");
    return SurrogateLoss(LossKind::q_norm_hinge, q);
  }
  static SurrogateLoss general_hinge(double eps = kDefaultEpsilon) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("general hinge needs eps > 0");
    return SurrogateLoss(LossKind::general_hinge, eps);
  }
  static SurrogateLoss distance_weighted(double eps = kDefaultEpsilon) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("distance-weighted loss needs eps > 0");
    return SurrogateLoss(LossKind::distance_weighted, eps);
  }

  /// Grammar: exp | logistic | hinge | abs | ls | ls-hinge | qhinge:<q> | ghinge:<eps> | dw:<eps>
  static SurrogateLoss parse(std::string_view text) {
    if (text == "exp") return exponential();
    if (text == "logistic") return logistic();
    if (text == "hinge") return hinge();
    if (text == "abs") return absolute();
    if (text == "ls") return least_square();
    if (text == "ls-hinge") return least_square_hinge();
    const auto colon = text.find(':');
    if (colon != std::string_view::npos) {
      const std::string_view head = text.substr(0, colon);
      const double param = parse_parameter(text.substr(colon + 1), text);
      if (head == "qhinge") return q_norm_hinge(param);
      if (head == "ghinge") return general_hinge(param);
      if (head == "dw") return distance_weighted(param);
    }
    throw std::invalid_argument("unknown loss '" + std::string(text) +
                                "' (expected exp|logistic|hinge|abs|ls|ls-hinge|qhinge:<q>|ghinge:<eps>|dw:<eps>)");
  }

  /// The nine catalogued kinds at their default parameters.
  static std::vector<SurrogateLoss> catalogue() {
    return {exponential(),   logistic(),         hinge(),          absolute(),           least_square(),
            least_square_hinge(), q_norm_hinge(), general_hinge(), distance_weighted()};
  }

  LossKind kind() const noexcept { return kind_; }
  /// q for q-norm hinge, eps for general hinge and distance-weighted, 0 otherwise.
  double parameter() const noexcept { return param_; }

  double value(double t) const {
    switch (kind_) {
      case LossKind::exponential:
        return std::exp(-t);
      case LossKind::logistic:
        return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
      case LossKind::hinge:
        return std::max(0.0, 1.0 - t);
      case LossKind::absolute:
        return std::abs(1.0 - t);
      case LossKind::least_square:
        return (1.0 - t) * (1.0 - t);
      case LossKind::least_square_hinge: {
        const double h = std::max(0.0, 1.0 - t);
        return h * h;
      }
      case LossKind::q_norm_hinge:
        return t < 1.0 ? std::pow(1.0 - t, param_) : 0.0;
      case LossKind::general_hinge: {
        const double eps = param_;
        if (t <= 1.0 - eps) return 1.0 - t;
        if (t < 1.0 + eps) return (t - 1.0 - eps) * (t - 1.0 - eps) / (4.0 * eps);
        return 0.0;
      }
      case LossKind::distance_weighted: {
        const double eps = param_;
        return t >= eps ? 1.0 / t : (2.0 - t / eps) / eps;
      }
    }
    return 0.0;
  }

  double derivative(double t) const {
    switch (kind_) {
      case LossKind::exponential:
        return -std::exp(-t);
      case LossKind::logistic:
        return t > 0.0 ? -std::exp(-t) / (1.0 + std::exp(-t)) : -1.0 / (1.0 + std::exp(t));
      case LossKind::hinge:
        return t < 1.0 ? -1.0 : 0.0;
      case LossKind::absolute:
        return t < 1.0 ? -1.0 : 1.0;
      case LossKind::least_square:
        return -2.0 * (1.0 - t);
      case LossKind::least_square_hinge:
        return t < 1.0 ? -2.0 * (1.0 - t) : 0.0;
      case LossKind::q_norm_hinge:
        return t < 1.0 ? -param_ * std::pow(1.0 - t, param_ - 1.0) : 0.0;
      case LossKind::general_hinge: {
        const double eps = param_;
        if (t < 1.0 - eps) return -1.0;
        if (t < 1.0 + eps) return (t - 1.0 - eps) / (2.0 * eps);
        return 0.0;
      }
      case LossKind::distance_weighted: {
        const double eps = param_;
        return t >= eps ? -1.0 / (t * t) : -1.0 / (eps * eps);
      }
    }
    return 0.0;
  }

  /// Points where phi or phi' changes formula. Used as extra candidates by the
  /// scalar minimizer, which makes piecewise-linear minima exact.
  std::vector<double> breakpoints() const {
    switch (kind_) {
      case LossKind::exponential:
      case LossKind::logistic:
        return {};
      case LossKind::hinge:
      case LossKind::absolute:
      case LossKind::least_square:
      case LossKind::least_square_hinge:
      case LossKind::q_norm_hinge:
        return {1.0};
      case LossKind::general_hinge:
        return {1.0 - param_, 1.0 + param_};
      case LossKind::distance_weighted:
        return {param_};
    }
    return {};
  }

  bool is_differentiable() const noexcept {
    return kind_ != LossKind::hinge && kind_ != LossKind::absolute;
  }

  /// Hinge and absolute: linear pieces with kinks at t = 1 only.
  bool is_piecewise_linear() const noexcept { return !is_differentiable(); }

  bool is_nonincreasing() const noexcept {
    return kind_ != LossKind::absolute && kind_ != LossKind::least_square;
  }

  /// phi'(0); every catalogued kind is differentiable at 0.
  double derivative_at_zero() const { return derivative(0.0); }

  /// Canonical text form, the inverse of parse().
  std::string name() const {
    switch (kind_) {
      case LossKind::exponential: return "exp";
      case LossKind::logistic: return "logistic";
      case LossKind::hinge: return "hinge";
      case LossKind::absolute: return "abs";
      case LossKind::least_square: return "ls";
      case LossKind::least_square_hinge: return "ls-hinge";
      case LossKind::q_norm_hinge: return "qhinge:" + format_parameter(param_);
      case LossKind::general_hinge: return "ghinge:" + format_parameter(param_);
      case LossKind::distance_weighted: return "dw:" + format_parameter(param_);
    }
    return "?";
  }

  friend bool operator==(const SurrogateLoss&, const SurrogateLoss&) = default;

 private:
  SurrogateLoss(LossKind kind, double param) : kind_(kind), param_(param) {}

  static double parse_parameter(std::string_view digits, std::string_view whole) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw std::invalid_argument("bad numeric parameter in loss '" + std::string(whole) + "'");
    }
    return out;
  }

  static std::string format_parameter(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
  }

  LossKind kind_;
  double param_;
};

inline double loss_eval(const SurrogateLoss& phi, double t) { return phi.value(t); }
inline double loss_subgradient(const SurrogateLoss& phi, double t) { return phi.derivative(t); }

/// Sufficient condition for AUC consistency: convex (all catalogued kinds),
/// differentiable, non-increasing, phi'(0) < 0.
inline bool sufficiency_gate(const SurrogateLoss& phi) {
  return phi.is_differentiable() && phi.is_nonincreasing() && phi.derivative_at_zero() < 0.0;
}

}  // namespace auclab
