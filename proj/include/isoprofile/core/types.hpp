#pragma once

#include <Eigen/Dense>
#include <numbers>

namespace isoprofile {

inline constexpr int kMaxDim = 3;

// Fixed-capacity dynamic vectors: chart dimension is 2 or 3 and the hot
// geodesic loops must not allocate.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

inline constexpr double kPi = std::numbers::pi;

/// Volume of the unit sphere S^{n-1} in R^n.
constexpr double sphere_area(int n) { return n == 2 ? 2.0 * kPi : 4.0 * kPi; }

/// Volume of the unit ball in R^n.
constexpr double ball_volume(int n) { return sphere_area(n) / n; }

}  // namespace isoprofile
