#pragma once

#include <span>
#include <vector>

#include "isoprofile/geometry/metric_chart.hpp"

namespace isoprofile::geometry {

/// RK4 step count for a geodesic of the given metric length.
/// Throws StepCountExceeded above chart.max_steps().
int step_count(const MetricChart& chart, double length);

struct GeodesicEnd {
  Vec position;      // not wrapped on periodic charts
  Vec displacement;  // position - p, accumulated without cancellation
  Vec velocity;
  double length = 0.0;  // accumulated metric length along the discrete path
};

/// Integrates gamma'' + Gamma(gamma', gamma') = 0 on [0,1] from p with
/// chart velocity v in `steps` RK4 steps.
GeodesicEnd shoot(const MetricChart& chart, const Vec& p, const Vec& v, int steps);

/// Displacements from p at the increasing parameter values `times` for the geodesic with
/// initial chart velocity w. Each interval between consecutive times gets
/// substeps[k] RK4 steps, so rays with nearby data share one discretization.
std::vector<Vec> sweep(const MetricChart& chart, const Vec& p, const Vec& w,
                       std::span<const double> times, std::span<const int> substeps);

/// Substep plan for sweep() over unit-speed rays.
std::vector<int> substep_plan(const MetricChart& chart, std::span<const double> times);

/// exp_p(E v) with v in orthonormal-frame components at p (E = chart.frame(p)).
/// Result is wrapped into the fundamental domain.
Vec exp_map(const MetricChart& chart, const Vec& p, const Vec& v);

/// Same as exp_map, unwrapped, with the step count fixed by the caller.
Vec exp_chart(const MetricChart& chart, const Vec& p, const Vec& v, int steps);

/// Frame components of exp_c^{-1}(z), by Newton shooting. On periodic charts
/// the nearest image of z is targeted.
Vec log_map(const MetricChart& chart, const Vec& c, const Vec& z);
/// log_map with a fixed RK4 step count, matching exp_chart(chart, c, v, steps).
Vec log_map(const MetricChart& chart, const Vec& c, const Vec& z, int steps);

/// Volume density in normal polar coordinates: dVol = lambda t^{n-1} dt dtheta,
/// theta a unit frame vector at p.
double radial_density(const MetricChart& chart, const Vec& p, const Vec& theta, double t);

/// radial_density at several increasing radii along one ray.
std::vector<double> radial_densities(const MetricChart& chart, const Vec& p, const Vec& theta,
                                     std::span<const double> radii);
/// Same with an explicit substep plan (see sweep).
std::vector<double> radial_densities(const MetricChart& chart, const Vec& p, const Vec& theta,
                                     std::span<const double> radii, std::span<const int> plan);

}  // namespace isoprofile::geometry
