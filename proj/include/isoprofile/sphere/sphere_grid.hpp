#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "isoprofile/core/types.hpp"

namespace isoprofile::sphere {

/// First and second derivatives of a nodal field in angular coordinates:
/// phi on the circle; (colatitude, azimuth) on S^2. Unused slots are empty.
struct AngularDerivatives {
  Eigen::VectorXd d1, d2;
  Eigen::VectorXd d11, d12, d22;
};

/// Quadrature and harmonic-transform grid on S^{n-1}.
///
/// n = 2: 4*degree equispaced angles with trapezoid weights. Coefficients are
/// ordered 1, cos(k phi), sin(k phi) for k = 1..degree, each L2-normalized.
/// n = 3: degree+1 Gauss-Legendre colatitudes times 2*degree+1 azimuths,
/// node index ring*ring_size + j. Real spherical harmonics, index l^2 for
/// m = 0 and l^2 + 2m - 1 / l^2 + 2m for the cos / sin pair.
class SphereGrid {
 public:
  SphereGrid(int ambient_dim, int degree);

  int ambient_dim() const { return n_; }
  int degree() const { return degree_; }
  std::size_t size() const { return nodes_.size(); }
  const Vec& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Vec>& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// Total measure of the sphere, 2*pi or 4*pi.
  double measure() const { return sphere_area(n_); }

  int coefficient_count() const { return static_cast<int>(basis_.cols()); }
  int degree_of(int coefficient) const { return coeff_degree_[coefficient]; }

  int rings() const { return rings_; }
  int ring_size() const { return ring_size_; }
  /// Angular coordinates of a node: (phi) or (colatitude, azimuth).
  double angle1(std::size_t i) const { return angle1_[i]; }
  double angle2(std::size_t i) const { return angle2_[i]; }

  Eigen::VectorXd analyze(const Eigen::VectorXd& values) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coefficients) const;
  /// Nodal values of one basis function.
  Eigen::VectorXd basis_function(int coefficient) const { return basis_.col(coefficient); }

  /// Spectral angular derivatives. On the circle the full nodal resolution
  /// is used; on S^2 the field is first truncated to the grid degree.
  AngularDerivatives derivatives(const Eigen::VectorXd& values) const;

  /// sqrt(det) of the round metric in the angular coordinates: 1 or sin(colatitude).
  double area_element(std::size_t i) const { return area_element_[i]; }
  /// Angular derivatives of the node map theta(angles) in R^n.
  const Vec& dtheta1(std::size_t i) const { return dtheta1_[i]; }
  const Vec& dtheta2(std::size_t i) const { return dtheta2_[i]; }

 private:
  int n_;
  int degree_;
  int rings_ = 1;
  int ring_size_ = 0;
  std::vector<Vec> nodes_, dtheta1_, dtheta2_;
  std::vector<double> angle1_, angle2_, area_element_;
  Eigen::VectorXd weights_;
  std::vector<int> coeff_degree_;
  Eigen::MatrixXd basis_;     // nodes x coefficients
  Eigen::MatrixXd analysis_;  // coefficients x nodes, basis^T W
  // Derivative synthesis matrices paired with deriv_analysis_.
  Eigen::MatrixXd deriv_analysis_;
  Eigen::MatrixXd b1_, b2_, b11_, b12_, b22_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

GridPtr make_grid(int ambient_dim, int degree = 16);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes increasing.
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace isoprofile::sphere
