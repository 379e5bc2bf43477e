#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "auclab/distribution.hpp"
#include "auclab/loss.hpp"
#include "auclab/risk.hpp"

namespace auclab {

struct OptimizerConfig {
  std::size_t max_iters = 100000;
  double tol = 1e-9;
  double radius = kDefaultRadius;
  std::uint64_t seed = 0;
};

struct MinimizationResult {
  ScoreVector minimizer;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Projected gradient norm for differentiable losses. For hinge and
  /// absolute, the largest decrease still available from a lattice move
  /// (0 once the optimum is certified).
  double gradient_norm = 0.0;
  /// Some score sits on the box |f_i| <= radius: the infimum lies at infinity
  /// and `value` is the boundary value.
  bool infimum_unattained = false;
  /// Upper bound on value - R_phi* (gradient norm times box diameter).
  double suboptimality_bound = 0.0;
};

struct NoObserver {
  void operator()(std::size_t, const std::vector<double>&, double) const noexcept {}
};

namespace detail {

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline bool touches_box(const std::vector<double>& x, double radius) {
  return std::any_of(x.begin(), x.end(), [&](double v) { return std::abs(v) >= radius; });
}

inline void center(std::vector<double>& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

inline void clip(std::vector<double>& x, double radius) {
  for (double& v : x) v = std::clamp(v, -radius, radius);
}

template <class Observer>
MinimizationResult minimize_smooth(const DiscreteDistribution& d, const SurrogateLoss& phi,
                                   const OptimizerConfig& config, Observer& observe) {
  const std::size_t n = d.size();
  const double radius = config.radius;
  auto risk = [&](const std::vector<double>& x) { return phi_risk(d, ScoreVector(x), phi); };
  auto gradient = [&](const std::vector<double>& x) { return phi_risk_gradient(d, ScoreVector(x), phi); };

  std::vector<double> x(n, 0.0);
  double fx = risk(x);
  std::vector<double> g = gradient(x);
  std::vector<double> prev_x;
  std::vector<double> prev_g;
  double step = 1.0;

  MinimizationResult out;
  std::size_t iter = 0;
  double gnorm = std::numeric_limits<double>::infinity();
  for (; iter < config.max_iters; ++iter) {
    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = -g[i];
      if ((x[i] >= radius && dir[i] > 0.0) || (x[i] <= -radius && dir[i] < 0.0)) dir[i] = 0.0;
    }
    gnorm = norm2(dir);
    observe(iter, x, fx);
    if (gnorm <= config.tol) {
      out.converged = true;
      break;
    }
    if (!prev_x.empty()) {
      double sy = 0.0;
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = x[i] - prev_x[i];
        sy += s * (g[i] - prev_g[i]);
        ss += s * s;
      }
      if (sy > 0.0) step = std::clamp(ss / sy, 1e-12, 1e12);
    }
    // Armijo with a rounding allowance: near the optimum the achievable
    // decrease is below the resolution of fx.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(fx);
    bool accepted = false;
    std::vector<double> xn(n);
    double fn = fx;
    for (double s = step; s > 1e-30; s *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + s * dir[i];
      if (!touches_box(xn, radius)) center(xn);
      clip(xn, radius);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (xn[i] - x[i]);
      fn = risk(xn);
      if (fn <= fx + 1e-4 * decrease + slack) {
        accepted = true;
        step = s;
        break;
      }
    }
    if (!accepted) break;
    prev_x = x;
    prev_g = g;
    x = xn;
    fx = fn;
    g = gradient(x);
  }
  // A tiny gradient far out can still mean the infimum is at infinity
  // (realizable pairs under exp/logistic). Probe along the descent direction
  // to the box; by convexity a lower value there means no interior optimum.
  if (out.converged && gnorm > 0.0) {
    double reach = std::numeric_limits<double>::infinity();
    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = -g[i];
      if (dir[i] > 0.0) reach = std::min(reach, (radius - x[i]) / dir[i]);
      if (dir[i] < 0.0) reach = std::min(reach, (-radius - x[i]) / dir[i]);
    }
    if (std::isfinite(reach) && reach > 0.0) {
      std::vector<double> xb(n);
      for (std::size_t i = 0; i < n; ++i) xb[i] = x[i] + reach * dir[i];
      clip(xb, radius);
      const double fb = risk(xb);
      if (fb < fx - 8.0 * std::numeric_limits<double>::epsilon() * std::abs(fx)) {
        x = xb;
        fx = fb;
        g = gradient(x);
        for (std::size_t i = 0; i < n; ++i) {
          dir[i] = -g[i];
          if ((x[i] >= radius && dir[i] > 0.0) || (x[i] <= -radius && dir[i] < 0.0)) dir[i] = 0.0;
        }
        gnorm = norm2(dir);
      }
    }
  }
  out.minimizer = ScoreVector(x);
  out.value = fx;
  out.iterations = iter;
  out.gradient_norm = gnorm;
  out.infimum_unattained = touches_box(x, radius);
  out.suboptimality_bound = gnorm * 2.0 * radius * std::sqrt(static_cast<double>(n));
  return out;
}

// Exact minimization over integer score vectors with f_0 pinned to 0. Valid for
// hinge and absolute losses: their kinks sit at differences of +-1, so every
// vertex of the linearity arrangement is integral, and a sum of convex
// functions of differences is L-natural convex, so a point no {-1,0,1} move
// improves is a global minimum.
inline double lattice_refine(const DiscreteDistribution& d, const SurrogateLoss& phi, std::vector<double>& x,
                             double radius) {
  const std::size_t n = x.size();
  const double anchor = x[0];
  for (double& v : x) v = std::clamp(std::round(v - anchor), -std::floor(radius), std::floor(radius));
  auto risk = [&](const std::vector<double>& y) { return phi_risk(d, ScoreVector(y), phi); };
  double fx = risk(x);
  std::size_t moves = 1;
  for (std::size_t i = 1; i < n; ++i) moves *= 3;
  std::vector<double> trial(n);
  for (;;) {
    double best_gain = 0.0;
    std::vector<double> best;
    for (std::size_t code = 0; code < moves; ++code) {
      std::size_t c = code;
      trial = x;
      bool inside = true;
      for (std::size_t i = 1; i < n; ++i) {
        trial[i] += static_cast<double>(c % 3) - 1.0;
        c /= 3;
        if (std::abs(trial[i]) > radius) inside = false;
      }
      if (!inside) continue;
      const double gain = fx - risk(trial);
      if (gain > best_gain) {
        best_gain = gain;
        best = trial;
      }
    }
    // Gains at rounding level are not improvements.
    if (best_gain <= 1e-14 * (1.0 + std::abs(fx))) return 0.0;
    x = best;
    fx -= best_gain;
  }
}

template <class Observer>
MinimizationResult minimize_kinked(const DiscreteDistribution& d, const SurrogateLoss& phi,
                                   const OptimizerConfig& config, Observer& observe) {
  constexpr double kStall = 1e-10;
  constexpr std::size_t kStallWindow = 500;
  const std::size_t n = d.size();
  const double radius = config.radius;
  auto risk = [&](const std::vector<double>& x) { return phi_risk(d, ScoreVector(x), phi); };

  std::vector<double> x(n, 0.0);
  double fx = risk(x);
  std::vector<double> best = x;
  double fbest = fx;
  std::size_t last_improvement = 0;
  std::size_t iter = 0;
  for (; iter < config.max_iters; ++iter) {
    observe(iter, x, fx);
    const std::vector<double> g = phi_risk_gradient(d, ScoreVector(x), phi);
    const double gnorm = norm2(g);
    if (gnorm == 0.0) break;
    const double s = 1.0 / std::sqrt(static_cast<double>(iter + 1));
    for (std::size_t i = 0; i < n; ++i) x[i] -= s * g[i] / gnorm;
    center(x);
    clip(x, radius);
    fx = risk(x);
    if (fx < fbest) {
      if (fx < fbest - kStall) last_improvement = iter;
      fbest = fx;
      best = x;
    }
    if (iter - last_improvement >= kStallWindow) break;
  }

  MinimizationResult out;
  // Left pinned at f_0 = 0 so exact ties and unit gaps survive.
  const double residual = lattice_refine(d, phi, best, radius);
  out.minimizer = ScoreVector(best);
  out.value = risk(best);
  out.iterations = iter;
  out.converged = residual == 0.0;
  out.gradient_norm = residual;
  out.infimum_unattained = false;
  out.suboptimality_bound = 0.0;
  return out;
}

}  // namespace detail

/// Minimizes R_phi over score vectors. R_phi depends only on score
/// differences, so the gauge is fixed by mean-centering; scores are confined
/// to |f_i| <= radius.
///
/// Differentiable losses: gradient descent with backtracking line search,
/// stopping at projected gradient norm <= tol. Hinge and absolute:
/// subgradient descent with 1/sqrt(k) steps until the best value stalls,
/// followed by exact lattice refinement. Hitting max_iters leaves
/// `converged` false.
template <class Observer = NoObserver>
MinimizationResult minimize_phi_risk(const DiscreteDistribution& d, const SurrogateLoss& phi,
                                     const OptimizerConfig& config = {}, Observer observe = {}) {
  if (!(config.radius > 0.0) || !(config.tol > 0.0) || config.max_iters == 0) {
    throw std::invalid_argument("optimizer config needs radius > 0, tol > 0, max_iters > 0");
  }
  if (phi.is_piecewise_linear()) return detail::minimize_kinked(d, phi, config, observe);
  return detail::minimize_smooth(d, phi, config, observe);
}

/// Axis grid for the brute-force oracle; every free coordinate takes values
/// lo, lo + step, ..., <= hi.
struct GridSpec {
  double lo = -9.0;
  double hi = 9.0;
  double step = 0.025;
};

struct GridOracleResult {
  double value = 0.0;
  ScoreVector argmin;
};

inline constexpr std::size_t kGridOracleMaxInstances = 4;

/// Exhaustive minimum of R_phi over a grid with f_0 pinned to 0. An upper
/// bound on R_phi*; independent of minimize_phi_risk.
template <PairwiseLoss L>
GridOracleResult grid_oracle_min_phi_risk(const DiscreteDistribution& d, const L& phi, const GridSpec& grid) {
  if (d.size() > kGridOracleMaxInstances) {
    throw std::invalid_argument("grid oracle supports at most 4 instances");
  }
  if (!(grid.step > 0.0) || !std::isfinite(grid.lo) || !std::isfinite(grid.hi) || grid.hi < grid.lo) {
    throw std::invalid_argument("empty grid");
  }
  const std::size_t points = static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
  const std::size_t free = d.size() - 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < free; ++i) total *= points;

  std::vector<double> f(d.size(), 0.0);
  GridOracleResult best{std::numeric_limits<double>::infinity(), ScoreVector::constant(d.size(), 0.0)};
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 1; i <= free; ++i) {
      f[i] = grid.lo + static_cast<double>(c % points) * grid.step;
      c /= points;
    }
    const double v = phi_risk(d, ScoreVector(f), phi);
    if (v < best.value) best = {v, ScoreVector(f)};
  }
  return best;
}

/// 2 * step * L, with L the largest (sub)gradient norm of R_phi over the
/// corners of the grid cell around `point` (f_0 pinned). By convexity the
/// grid minimum exceeds R_phi(point) by at most this much.
template <PairwiseLoss L>
double grid_resolution_bound(const DiscreteDistribution& d, const L& phi, const GridSpec& grid,
                             const ScoreVector& point) {
  const std::size_t n = d.size();
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = point[i] - point[0];
  double lipschitz = 0.0;
  const std::size_t corners = std::size_t{1} << (n - 1);
  for (std::size_t mask = 0; mask < corners; ++mask) {
    std::vector<double> corner(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double k = std::floor((base[i] - grid.lo) / grid.step) + ((mask >> (i - 1)) & 1u);
      corner[i] = grid.lo + k * grid.step;
    }
    lipschitz = std::max(lipschitz, detail::norm2(phi_risk_gradient(d, ScoreVector(corner), phi)));
  }
  return 2.0 * grid.step * lipschitz;
}

}  // namespace auclab
