#pragma once

#include <functional>
#include <iosfwd>

#include "isoprofile/sphere/sphere_grid.hpp"

namespace isoprofile::sphere {

/// Real values at the nodes of a shared grid. Value type; the grid is immutable.
class SphericalField {
 public:
  SphericalField() = default;
  SphericalField(GridPtr grid, Eigen::VectorXd values);

  static SphericalField constant(GridPtr grid, double c);
  static SphericalField from_function(GridPtr grid, const std::function<double(const Vec&)>& f);
  static SphericalField from_coefficients(GridPtr grid, const Eigen::VectorXd& coefficients);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  Eigen::VectorXd coefficients() const { return grid_->analyze(values_); }
  /// L2 norm of the degree-l part.
  double degree_norm(int l) const;
  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }

  SphericalField& operator+=(const SphericalField& o);
  SphericalField& operator-=(const SphericalField& o);
  SphericalField& operator*=(double s);

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

SphericalField operator+(SphericalField a, const SphericalField& b);
SphericalField operator-(SphericalField a, const SphericalField& b);
SphericalField operator*(double s, SphericalField a);

/// Quadrature sum of f over the sphere.
double integrate(const SphericalField& f);

/// Integral of f(theta) theta over the sphere.
Vec first_moment(const SphericalField& f);

/// Orthogonal projector onto degree-1 harmonics and its complement.
SphericalField project_P(const SphericalField& f);
SphericalField project_Q(const SphericalField& f);

/// Eigenvalue of L = -Laplacian - (n-1) on degree-l harmonics.
double L_multiplier(int n, int l);

SphericalField apply_L(const SphericalField& v);

/// Unique v with L v = rhs and P v = 0. RhsNotInRange if |P rhs| exceeds tol.
SphericalField solve_L(const SphericalField& rhs, double tol = 1e-10);

/// Drops content above the grid degree.
SphericalField band_limit(const SphericalField& f);

/// CSV rows "theta1,...,thetan,value" with a header line.
void write_csv(std::ostream& out, const SphericalField& f);

}  // namespace isoprofile::sphere
