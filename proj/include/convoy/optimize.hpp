// Scalar minimization helpers.
#pragma once

#include <cmath>
#include <utility>

namespace convoy {

/// Golden-section search for the minimum of f on [lo, hi] with a fixed
/// iteration count. Returns (argmin, f(argmin)); deterministic, no
/// derivatives. Degenerate brackets (hi <= lo) return the midpoint.
template <typename F>
std::pair<double, double> golden_section_min(F&& f, double lo, double hi, int iterations) {
  if (!(hi > lo)) {
    const double x = 0.5 * (lo + hi);
    return {x, f(x)};
  }
  constexpr double inv_phi = 0.6180339887498949;  // 1/phi
  double a = lo, b = hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = f(d);
    }
  }
  return fc < fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

}  // namespace convoy
