#include "isoprofile/geometry/geodesic.hpp"

#include <cmath>
#include <sstream>

#include "isoprofile/core/error.hpp"

namespace isoprofile::geometry {

namespace {

constexpr double kDensityEps = 1e-4;
constexpr int kLogMaxIter = 50;

struct State {
  Vec x;
  Vec w;
};

double required_margin(const MetricChart& chart) {
  return chart.christoffel_mode() == ChristoffelMode::FiniteDifference ? 2.0 * chart.fd_step()
                                                                       : 1e-12;
}

Vec acceleration(const MetricChart& chart, const Vec& x, const Vec& w, double margin) {
  if (!chart.contains(x, margin)) {
    std::ostringstream os;
    os << "geodesic left chart " << chart.label() << " near (" << x.transpose() << ")";
    throw Error(ErrorKind::GeodesicEscapedChart, os.str());
  }
  const Christoffel g = chart.christoffel_unchecked(x);
  const int n = chart.dim();
  Vec a = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += g(k, i, j) * w[i] * w[j];
    a[k] = -s;
  }
  return a;
}

// The state stores the displacement y from a fixed base point so that
// positions far from the chart origin keep full relative precision in y.
void rk4_step(const MetricChart& chart, const Vec& base, State& s, double h, double margin) {
  const Vec k1x = s.w;
  const Vec k1w = acceleration(chart, base + s.x, s.w, margin);
  const Vec x2 = s.x + 0.5 * h * k1x, w2 = s.w + 0.5 * h * k1w;
  const Vec k2w = acceleration(chart, base + x2, w2, margin);
  const Vec x3 = s.x + 0.5 * h * w2, w3 = s.w + 0.5 * h * k2w;
  const Vec k3w = acceleration(chart, base + x3, w3, margin);
  const Vec x4 = s.x + h * w3, w4 = s.w + h * k3w;
  const Vec k4w = acceleration(chart, base + x4, w4, margin);
  s.x += (h / 6.0) * (k1x + 2.0 * w2 + 2.0 * w3 + w4);
  s.w += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
}

double speed(const MetricChart& chart, const Vec& x, const Vec& w) {
  return std::sqrt(w.dot(chart.metric(x) * w));
}

}  // namespace

int step_count(const MetricChart& chart, double length) {
  const double raw = std::ceil(chart.steps_per_unit() * length);
  if (!(raw <= chart.max_steps()))
    throw Error(ErrorKind::StepCountExceeded, "geodesic needs more than max_steps RK4 steps");
  return std::max(1, static_cast<int>(raw));
}

GeodesicEnd shoot(const MetricChart& chart, const Vec& p, const Vec& v, int steps) {
  const double margin = required_margin(chart);
  State s{Vec::Zero(p.size()), v};
  const double h = 1.0 / steps;
  double length = 0.0;
  double prev = speed(chart, p, s.w);
  for (int i = 0; i < steps; ++i) {
    rk4_step(chart, p, s, h, margin);
    if (!chart.contains(p + s.x, margin))
      throw Error(ErrorKind::GeodesicEscapedChart, "geodesic left chart " + chart.label());
    const double cur = speed(chart, p + s.x, s.w);
    length += 0.5 * h * (prev + cur);
    prev = cur;
  }
  return {p + s.x, s.x, s.w, length};
}

std::vector<int> substep_plan(const MetricChart& chart, std::span<const double> times) {
  std::vector<int> plan(times.size());
  double prev = 0.0;
  long total = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dt = times[k] - prev;
    plan[k] = dt > 0.0 ? step_count(chart, dt) : 0;
    total += plan[k];
    prev = times[k];
  }
  if (total > chart.max_steps())
    throw Error(ErrorKind::StepCountExceeded, "sweep needs more than max_steps RK4 steps");
  return plan;
}

std::vector<Vec> sweep(const MetricChart& chart, const Vec& p, const Vec& w,
                       std::span<const double> times, std::span<const int> substeps) {
  const double margin = required_margin(chart);
  std::vector<Vec> out(times.size());
  State s{Vec::Zero(p.size()), w};
  double prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dt = times[k] - prev;
    if (dt < 0.0) throw Error(ErrorKind::InvalidArgument, "sweep times must increase");
    if (substeps[k] > 0) {
      const double h = dt / substeps[k];
      for (int i = 0; i < substeps[k]; ++i) rk4_step(chart, p, s, h, margin);
      if (!chart.contains(p + s.x, margin))
        throw Error(ErrorKind::GeodesicEscapedChart, "geodesic left chart " + chart.label());
    }
    out[k] = s.x;
    prev = times[k];
  }
  return out;
}

Vec exp_chart(const MetricChart& chart, const Vec& p, const Vec& v, int steps) {
  return shoot(chart, p, chart.frame(p) * v, steps).position;
}

Vec exp_map(const MetricChart& chart, const Vec& p, const Vec& v) {
  const double len = v.norm();
  if (len > chart.max_radius(p)) {
    std::ostringstream os;
    os << "|v| = " << len << " exceeds max radius " << chart.max_radius(p) << " at ("
       << p.transpose() << ")";
    throw Error(ErrorKind::GeodesicEscapedChart, os.str());
  }
  return chart.wrap(exp_chart(chart, p, v, step_count(chart, len)));
}

Vec log_map(const MetricChart& chart, const Vec& c, const Vec& z) {
  const Mat e = chart.frame(c);
  const double guess = (e.inverse() * chart.displacement(c, z)).norm();
  return log_map(chart, c, z, step_count(chart, 1.25 * guess));
}

Vec log_map(const MetricChart& chart, const Vec& c, const Vec& z, int steps) {
  const int n = chart.dim();
  const Vec d = chart.displacement(c, z);
  const Mat e = chart.frame(c);
  Vec v = e.inverse() * d;
  const double scale = d.norm();
  if (scale == 0.0) return v;
  const auto residual = [&](const Vec& u) { return (shoot(chart, c, e * u, steps).displacement - d).eval(); };

  Vec f = residual(v);
  for (int iter = 0; iter < kLogMaxIter; ++iter) {
    if (f.norm() <= 1e-14 * scale) return v;
    const double eps = 1e-7 * v.norm();
    Mat jac(n, n);
    for (int j = 0; j < n; ++j) {
      Vec vj = v;
      vj[j] += eps;
      jac.col(j) = (residual(vj) - f) / eps;
    }
    const Vec delta = jac.partialPivLu().solve(-f);
    v += delta;
    const Vec f_new = residual(v);
    // Stagnation at round-off level counts as converged.
    if (delta.norm() <= 1e-15 * v.norm() && f_new.norm() <= 1e-11 * scale) return v;
    f = f_new;
  }
  if (f.norm() <= 1e-11 * scale) return v;
  throw Error(ErrorKind::NoConvergence, "log_map shooting did not converge");
}

std::vector<double> radial_densities(const MetricChart& chart, const Vec& p, const Vec& theta,
                                     std::span<const double> radii) {
  return radial_densities(chart, p, theta, radii, substep_plan(chart, radii));
}

std::vector<double> radial_densities(const MetricChart& chart, const Vec& p, const Vec& theta,
                                     std::span<const double> radii, std::span<const int> plan) {
  const int n = chart.dim();
  if (!radii.empty() && radii.back() > chart.max_radius(p))
    throw Error(ErrorKind::GeodesicEscapedChart, "radial_density: t exceeds max radius");
  const Mat e = chart.frame(p);
  const std::vector<Vec> centre = sweep(chart, p, e * theta, radii, plan);
  std::vector<std::vector<Vec>> plus(n), minus(n);
  for (int j = 0; j < n; ++j) {
    Vec d = Vec::Zero(n);
    d[j] = kDensityEps;
    plus[j] = sweep(chart, p, e * (theta + d), radii, plan);
    minus[j] = sweep(chart, p, e * (theta - d), radii, plan);
  }
  std::vector<double> lambda(radii.size(), 1.0);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double t = radii[k];
    if (t <= 0.0) continue;
    Mat m(n, n);
    for (int j = 0; j < n; ++j) m.col(j) = (plus[j][k] - minus[j][k]) / (2.0 * kDensityEps * t);
    lambda[k] = std::sqrt(chart.metric(p + centre[k]).determinant()) * std::abs(m.determinant());
  }
  return lambda;
}

double radial_density(const MetricChart& chart, const Vec& p, const Vec& theta, double t) {
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "radial_density: t must be >= 0");
  if (t == 0.0) return 1.0;
  const double radii[] = {t};
  return radial_densities(chart, p, theta, radii).front();
}

}  // namespace isoprofile::geometry
