#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isoprofile/geometry/metric_chart.hpp"
#include "isoprofile/pseudoball/pseudoball.hpp"

namespace isoprofile::expansion {

using geometry::CurvaturePack;
using geometry::MetricChart;
using sphere::GridPtr;

/// Laurent coefficients of the inward mean curvature of small geodesic
/// spheres in the direction theta: H = h_minus1 / r + h1 r + O(r^2).
struct RiccatiSeries {
  double h_minus1 = 0.0;
  double h1 = 0.0;
};

/// Solves U' + U^2 + R_theta = 0 order by order for the shape operator of
/// distance spheres, U = I/r + U1 r + ..., and traces. theta is a chart
/// tangent vector; it is normalized with curv.metric.
RiccatiSeries riccati_h_series(const CurvaturePack& curv, const Vec& theta);

/// Least-squares fit of an observable normalized by its Euclidean value
/// against {1, s, s^2}, where s is r^2 (or (v/omega_n)^{2/n} for profiles).
struct ExpansionFit {
  std::string observable;  // "area", "volume" or "profile"
  std::vector<int> powers{0, 2, 4};
  std::vector<double> coefficients;
  /// RMS fit residual relative to |coefficients[0]|.
  double residual = 0.0;
  std::vector<double> samples;  // radii, or volumes for profiles
  std::vector<double> values;   // area / volume / f(p,v)
  std::vector<double> normalized;
  double coefficient = 0.0;  // order-2 coefficient
  double reference = 0.0;
  double error = 0.0;  // |coefficient - reference|
  /// Order-2 coefficient refitted without the largest sample, and its
  /// relative change.
  double refit_coefficient = 0.0;
  double refit_change = 0.0;
  double scalar_curvature = 0.0;
};

struct FitOptions {
  pseudoball::VolumeOptions volume;  // also supplies the solver options
  int workers = 1;
};

/// {0.30, 0.25, 0.20, 0.15, 0.10, 0.05} in units of the chart length scale.
std::vector<double> default_radii(const MetricChart& chart);
/// omega_n r^n for the default radii.
std::vector<double> default_volumes(const MetricChart& chart);

/// c2 of area / (alpha r^{n-1}) = 1 + c2 r^2 + ..., reference -Sc/(2n).
ExpansionFit fit_area_coefficient(const MetricChart& chart, const Vec& p,
                                  const std::vector<double>& radii, const GridPtr& grid,
                                  const FitOptions& options = {});

/// gamma of volume / (alpha r^n / n) = 1 + gamma r^2 + ...,
/// reference -(n+1) Sc / (2 (n-1) (n+2)).
ExpansionFit fit_volume_coefficient(const MetricChart& chart, const Vec& p,
                                    const std::vector<double>& radii, const GridPtr& grid,
                                    const FitOptions& options = {});

/// a of f(p,v) / (c_n v^{(n-1)/n}) = 1 + a (v/omega_n)^{2/n} + ...,
/// reference -Sc / (2n(n+2)).
ExpansionFit fit_profile_coefficient(const MetricChart& chart, const Vec& p,
                                     const std::vector<double>& volumes, const GridPtr& grid,
                                     const FitOptions& options = {});

/// Euclidean isoperimetric constant alpha_{n-1} / omega_n^{(n-1)/n}.
double isoperimetric_constant(int n);

struct ProfileSample {
  Vec p;
  double f = 0.0;
};

struct ProfilePoint {
  double v = 0.0;
  Vec minimizer;
  double value = 0.0;  // I(v): f at the minimizer
  std::vector<ProfileSample> samples;  // scan grid, then refinement probes
  std::size_t grid_samples = 0;
  double grid_step = 0.0;
  double final_step = 0.0;
};

struct ScanOptions {
  int points_per_axis = 8;
  int refine_rounds = 10;
  FitOptions fit;
};

/// Scan lattice over the fundamental domain: the unit torus, or the chart
/// ball |x| <= 1/sqrt(K0) (a closed hemisphere) boxed for sphere bases.
std::vector<Vec> scan_lattice(const MetricChart& chart, int points_per_axis, double& step);

/// f(p,v) = beta(p,v).area on the lattice, then coordinate search from the
/// best point (step halves each round). Ties go to the lexicographically
/// smallest chart point.
ProfilePoint profile_scan(const MetricChart& chart, double v, const GridPtr& grid,
                          const ScanOptions& options = {});

/// Boundary area of the geodesic ball of volume v in the simply connected
/// model space of curvature k0.
double constant_curvature_reference(double k0, int n, double v);

/// CSV "r,area,normalized" (or "v,f,normalized").
void write_fit_csv(std::ostream& out, const ExpansionFit& fit);
void write_scan_csv(std::ostream& out, const ProfilePoint& point);

}  // namespace isoprofile::expansion
