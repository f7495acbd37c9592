#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "isoprofile/core/types.hpp"
#include "isoprofile/geometry/jet.hpp"

namespace isoprofile::geometry {

enum class ChristoffelMode { Analytic, FiniteDifference };

enum class BaseKind { Euclidean, Sphere, Hyperbolic, FlatTorus, General };

/// Axis-aligned box, optionally intersected with a centered Euclidean ball.
/// Periodic charts identify opposite faces of the box.
struct ChartDomain {
  Vec lo;
  Vec hi;
  double ball_radius = std::numeric_limits<double>::infinity();
  bool periodic = false;
};

/// Christoffel symbols of the second kind, Gamma^k_ij stored at [k][i][j].
struct Christoffel {
  int dim = 0;
  std::array<std::array<std::array<double, 3>, 3>, 3> symbols{};

  double operator()(int k, int i, int j) const { return symbols[k][i][j]; }
};

/// Curvature at one point, chart components.
/// riemann[i][j][k][l] = <R(d_i, d_j) d_k, d_l> with
/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, so the
/// sectional curvature of span{X,Y} is R(X,Y,Y,X)/|X^Y|^2 and
/// ricci_jk = sum_i R^i_ijk.
struct CurvaturePack {
  using Riemann = std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3>;

  int dim = 0;
  Riemann riemann{};
  Mat ricci;
  double scalar = 0.0;
  Mat metric;  // g_ij at the same point

  /// Ric(v, v) for a chart tangent vector v.
  double ricci_of(const Vec& v) const { return v.dot(ricci * v); }
};

/// Log conformal factor: the metric is exp(2 f) times the Euclidean one.
using LogFactorFn = std::function<Jet(const Vec&)>;
using MetricFn = std::function<Mat(const Vec&)>;

/// A single coordinate chart carrying a Riemannian metric. Immutable and
/// cheap to copy; safe to share between threads.
class MetricChart {
 public:
  /// The Euclidean plane.
  MetricChart();
  static MetricChart euclidean(int dim);
  /// Stereographic chart of the round sphere of curvature k0 > 0:
  /// g = 4 delta / (1 + k0 |x|^2)^2.
  static MetricChart sphere_stereographic(int dim, double k0);
  /// Poincare ball of curvature k0 < 0, same conformal factor as above,
  /// restricted to |x| < 1/sqrt(-k0).
  static MetricChart hyperbolic_poincare(int dim, double k0);
  /// Unit flat torus: periodic chart on [0,1)^n.
  static MetricChart flat_torus(int dim);
  /// exp(2 phi) times the base metric. The base must be conformally flat
  /// (every catalog member is), so analytic Christoffels stay available.
  static MetricChart conformal(const MetricChart& base, LogFactorFn phi,
                               std::string phi_label);
  /// Arbitrary metric evaluator; only finite-difference mode is available.
  static MetricChart general(int dim, MetricFn metric, ChartDomain domain,
                             double length_scale, std::string label);

  int dim() const;
  const std::string& label() const;
  BaseKind base() const;
  double k0() const;
  const ChartDomain& domain() const;
  ChristoffelMode christoffel_mode() const;
  double fd_step() const;
  int steps_per_unit() const;
  int max_steps() const;
  bool has_analytic() const;
  bool is_conformal_perturbation() const;
  /// Natural length unit (curvature radius, or injectivity radius of the
  /// torus); sample radii for expansion fits are expressed in it.
  double length_scale() const;

  MetricChart with_christoffel_mode(ChristoffelMode mode) const;
  MetricChart with_fd_step(double h) const;
  MetricChart with_steps_per_unit(int steps) const;

  /// Periodic identification into the fundamental box (identity otherwise).
  Vec wrap(const Vec& x) const;
  /// Chart displacement from a to b; nearest periodic image on tori.
  Vec displacement(const Vec& from, const Vec& to) const;
  /// Euclidean chart distance to the domain boundary; half the period on tori.
  double margin(const Vec& x) const;
  bool contains(const Vec& x, double margin = 0.0) const;
  /// Chart margin converted to metric length with the smallest metric
  /// eigenvalue at p.
  double chart_radius(const Vec& p) const;
  /// Largest geodesic length exp_map accepts from p.
  double max_radius(const Vec& p) const;

  /// g_ij(x). Throws OutOfChart outside the domain, DegenerateMetric if g is
  /// not positive definite.
  Mat metric(const Vec& x) const;
  /// Symmetric E with E^T g(p) E = I: frame components -> chart components.
  Mat frame(const Vec& p) const;
  /// Analytic log conformal factor with derivatives (requires has_analytic).
  Jet log_factor(const Vec& x) const;

  /// Christoffels without the margin check, for inner loops that already
  /// validated the point.
  Christoffel christoffel_unchecked(const Vec& x) const;

 private:
  struct Impl;
  explicit MetricChart(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Gamma^k_ij at x. Requires margin >= 2 fd_step (OutOfChart otherwise).
Christoffel christoffel(const MetricChart& chart, const Vec& x);

/// Riemann, Ricci and scalar curvature at p. Requires margin >= 4 fd_step.
CurvaturePack curvature_at(const MetricChart& chart, const Vec& p);

/// Scalar curvature only.
double scalar_curvature(const MetricChart& chart, const Vec& p);

}  // namespace isoprofile::geometry
