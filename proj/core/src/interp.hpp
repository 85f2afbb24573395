#pragma once

// Small stencil helpers on uniform grids. Not installed.

#include <array>
#include <cstddef>

namespace fracsing::detail {

/// Weights of the 4-point Lagrange interpolant on nodes 0,1,2,3 at x (in node units).
inline std::array<double, 4> cubic_weights(double x) {
  const double a = x, b = x - 1.0, c = x - 2.0, d = x - 3.0;
  return {-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0};
}

/// First index of a 4-node window around x in [0, m-1], clamped to the grid.
inline std::size_t cubic_window(double x, std::size_t m) {
  long base = static_cast<long>(x) - 1;
  if (base < 0) base = 0;
  if (base + 3 > static_cast<long>(m) - 1) base = static_cast<long>(m) - 4;
  return static_cast<std::size_t>(base);
}

/// 4th-order first derivative at node i of a uniform sequence f with spacing h;
/// centered where possible, one-sided (5 points) near the ends. Needs m >= 5.
template <class F>
double derivative4(F&& f, std::size_t i, std::size_t m, double h) {
  if (i >= 2 && i + 2 < m) {
    return (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
  }
  if (i < 2) {
    const std::size_t k = 0;
    const double x = static_cast<double>(i);
    // derivative of the quartic through nodes 0..4 at x in {0, 1}
    if (x == 0.0) {
      return (-25.0 * f(k) + 48.0 * f(k + 1) - 36.0 * f(k + 2) + 16.0 * f(k + 3) - 3.0 * f(k + 4)) /
             (12.0 * h);
    }
    return (-3.0 * f(k) - 10.0 * f(k + 1) + 18.0 * f(k + 2) - 6.0 * f(k + 3) + f(k + 4)) / (12.0 * h);
  }
  const std::size_t k = m - 5;
  if (i == m - 1) {
    return (3.0 * f(k) - 16.0 * f(k + 1) + 36.0 * f(k + 2) - 48.0 * f(k + 3) + 25.0 * f(k + 4)) /
           (12.0 * h);
  }
  return (-f(k) + 6.0 * f(k + 1) - 18.0 * f(k + 2) + 10.0 * f(k + 3) + 3.0 * f(k + 4)) / (12.0 * h);
}

}  // namespace fracsing::detail
