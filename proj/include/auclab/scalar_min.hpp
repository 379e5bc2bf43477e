#pragma once

#include <cmath>
#include <span>

namespace auclab {

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
};

/// Minimizes a convex function on [lo, hi] by golden-section search, then
/// compares against the endpoints and the supplied candidate points (kinks of
/// the loss) that fall inside the interval. For piecewise-linear objectives
/// the minimum sits at a kink, so the candidates make the result exact.
template <class F>
ScalarMinimum minimize_convex_1d(F&& g, double lo, double hi, std::span<const double> candidates = {}) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (gc <= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  ScalarMinimum best{0.5 * (a + b), g(0.5 * (a + b))};
  auto consider = [&](double x) {
    if (x < lo || x > hi) return;
    const double v = g(x);
    if (v < best.value) best = {x, v};
  };
  consider(c);
  consider(d);
  consider(lo);
  consider(hi);
  for (double x : candidates) consider(x);
  return best;
}

}  // namespace auclab
