#pragma once

#include <cmath>

namespace meva {

/// Closed-form RBF kernel terms for the 2-D Laplacian collocation machinery.
/// With g = exp(-s / (2 l^2)), s = |x - y|^2:
///   value:            g
///   (-Lap_2) k:       (2/l^2 - s/l^4) g        (same for -Lap_1 by symmetry)
///   (-Lap_1)(-Lap_2): (8/l^4 - 8 s/l^6 + s^2/l^8) g
struct RbfPde {
  double l2;  // lengthscale squared

  explicit RbfPde(double lengthscale) : l2(lengthscale * lengthscale) {}

  double value(double s) const { return std::exp(-0.5 * s / l2); }
  double neg_lap(double s) const { return (2.0 / l2 - s / (l2 * l2)) * value(s); }
  double neg_lap_both(double s) const {
    const double l4 = l2 * l2;
    return (8.0 / l4 - 8.0 * s / (l4 * l2) + s * s / (l4 * l4)) * value(s);
  }
};

inline double sqdist2(double ax, double ay, double bx, double by) {
  const double dx = ax - bx, dy = ay - by;
  return dx * dx + dy * dy;
}

}  // namespace meva
