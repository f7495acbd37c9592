#pragma once

#include <optional>
#include <vector>

#include "isoprofile/geometry/metric_chart.hpp"
#include "isoprofile/sphere/field.hpp"

namespace isoprofile::pseudoball {

using geometry::MetricChart;
using sphere::GridPtr;
using sphere::SphericalField;

/// Radial graph exp_p(r (1 + x(theta)) E theta) over the unit frame sphere at p.
struct NormalGraph {
  MetricChart chart;
  Vec p;
  double r = 0.0;
  SphericalField x;
  /// RK4 steps per ray; every node of a graph shares one count so that the
  /// embedding is a smooth function of theta.
  int ray_steps = 0;
};

/// Builds a graph, choosing ray_steps from r and x unless given. Checks
/// |x| < 1 and that every ray stays below the chart max radius.
NormalGraph make_graph(const MetricChart& chart, const Vec& p, double r, SphericalField x,
                       int ray_steps = 0);

/// Default ray step count for graphs of parameter r.
int default_ray_steps(const MetricChart& chart, double r);

struct GraphGeometry {
  std::vector<Vec> points;  // chart coordinates, unwrapped near p
  SphericalField mean_curvature;
  SphericalField sigma;
  double area = 0.0;
};

/// Embedding, inward mean curvature and area density in one pass.
GraphGeometry graph_geometry(const NormalGraph& graph, int workers = 1);

SphericalField mean_curvature(const NormalGraph& graph);
SphericalField sigma_density(const NormalGraph& graph);
/// r H(p, r(1+x)) - (n-1).
SphericalField psi(const MetricChart& chart, const Vec& p, double r, const SphericalField& x);

struct CenterOfMassOptions {
  int max_iterations = 100;
  double tol = 1e-10;
  int steps = 0;  // fixed RK4 count for exp/log, 0 = automatic
};

struct CenterOfMass {
  Vec point;
  /// |sum mu_i log_c(z_i)| / sum mu_i at the returned point.
  double first_order_residual = 0.0;
  int iterations = 0;
};

/// Riemannian center of mass of weighted points by the fixed-point iteration
/// c <- exp_c(mean log_c z). Starts from `start` when given.
CenterOfMass center_of_mass(const MetricChart& chart, const std::vector<Vec>& points,
                            const std::vector<double>& weights,
                            std::optional<Vec> start = std::nullopt,
                            const CenterOfMassOptions& options = {});

/// exp_p^{-1}(center of mass of the graph) / r, frame components.
Vec A_defect(const MetricChart& chart, const Vec& p, double r, const SphericalField& x);

struct SolverOptions {
  double tol = 1e-9;
  int max_iterations = 60;
  int volume_nodes = 24;
  int ray_steps = 0;
  int workers = 1;
  double r_max_fraction = 0.3;
  bool compute_volume = true;
  /// Karcher center of mass of the final graph (for residual_A).
  bool compute_center = true;
  std::optional<SphericalField> initial_x;
};

struct PseudoBallSolution {
  NormalGraph graph;
  double residual_Q = 0.0;
  double residual_A = 0.0;
  Vec center_of_mass;
  double area = 0.0;
  double enclosed_volume = 0.0;
  double rho = 0.0;  // (volume / omega_n)^{1/n}
  int iterations = 0;
};

/// Largest admissible r at p.
double r_max(const MetricChart& chart, const Vec& p, double fraction = 0.3);

PseudoBallSolution solve_pseudo_ball(const MetricChart& chart, const Vec& p, double r,
                                     const GridPtr& grid, const SolverOptions& options = {});

/// Gauss quadrature in t of the polar volume of {exp_p(t theta), t <= u(theta)}.
double enclosed_volume(const NormalGraph& graph, int t_nodes = 24, int workers = 1);

struct VolumeOptions {
  // Inner solves must be well below rel_tol for the volume to be a smooth
  // function of r.
  SolverOptions solver = [] {
    SolverOptions o;
    o.tol = 1e-10;
    return o;
  }();
  double rel_tol = 1e-10;
  int max_iterations = 40;
};

/// r with enclosed_volume(solve_pseudo_ball(r)) = v.
double radius_for_volume(const MetricChart& chart, const Vec& p, double v, const GridPtr& grid,
                         const VolumeOptions& options = {});

/// The pseudo-ball enclosing volume v.
PseudoBallSolution beta(const MetricChart& chart, const Vec& p, double v, const GridPtr& grid,
                        const VolumeOptions& options = {});

/// Same, parameterized by rho: volume omega_n rho^n.
PseudoBallSolution beta_rho(const MetricChart& chart, const Vec& p, double rho,
                            const GridPtr& grid, const VolumeOptions& options = {});

}  // namespace isoprofile::pseudoball
