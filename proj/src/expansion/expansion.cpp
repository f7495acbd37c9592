#include "isoprofile/expansion/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "isoprofile/core/error.hpp"
#include "isoprofile/core/parallel.hpp"

namespace isoprofile::expansion {

namespace {

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Gram-Schmidt in the metric g, starting from theta.
std::vector<Vec> orthonormal_complement(const Mat& g, const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  const auto dot = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };
  std::vector<Vec> basis{theta / std::sqrt(dot(theta, theta))};
  for (int k = 0; k < n && static_cast<int>(basis.size()) < n; ++k) {
    Vec e = Vec::Unit(n, k);
    for (const Vec& b : basis) e -= dot(e, b) * b;
    const double len = std::sqrt(std::max(0.0, dot(e, e)));
    if (len > 1e-8) basis.push_back(e / len);
  }
  basis.erase(basis.begin());
  return basis;
}

double riemann_of(const CurvaturePack& c, const Vec& a, const Vec& b, const Vec& d, const Vec& e) {
  const int n = c.dim;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += c.riemann[i][j][k][l] * a[i] * b[j] * d[k] * e[l];
  return s;
}

struct Fit {
  std::vector<double> coefficients;
  double residual = 0.0;
};

Fit least_squares(const std::vector<double>& s, const std::vector<double>& y) {
  const auto m = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double si = s[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    a(i, 1) = si;
    a(i, 2) = si * si;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  Fit fit;
  fit.coefficients.assign(c.data(), c.data() + c.size());
  const double rms = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(m));
  fit.residual = rms / std::max(std::abs(c(0)), 1e-300);
  return fit;
}

void finish(ExpansionFit& out, const std::vector<double>& s) {
  if (out.samples.size() < 4)
    throw Error(ErrorKind::InvalidArgument, "expansion fits need at least 4 samples");
  const Fit all = least_squares(s, out.normalized);
  out.coefficients = all.coefficients;
  out.residual = all.residual;
  out.coefficient = all.coefficients[1];
  out.error = std::abs(out.coefficient - out.reference);

  const auto largest = static_cast<std::size_t>(
      std::max_element(out.samples.begin(), out.samples.end()) - out.samples.begin());
  std::vector<double> s2, y2;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != largest) {
      s2.push_back(s[i]);
      y2.push_back(out.normalized[i]);
    }
  out.refit_coefficient = least_squares(s2, y2).coefficients[1];
  out.refit_change = std::abs(out.refit_coefficient - out.coefficient) /
                     std::max(std::abs(out.coefficient), 1e-12);
}

void require_samples(const std::vector<double>& samples) {
  if (samples.size() < 4)
    throw Error(ErrorKind::InvalidArgument, "expansion fits need at least 4 samples");
  for (double s : samples)
    if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "samples must be positive");
}

pseudoball::SolverOptions solver_of(const FitOptions& options, bool volume) {
  pseudoball::SolverOptions o = options.volume.solver;
  o.compute_center = false;
  o.compute_volume = volume;
  o.workers = options.workers;
  return o;
}

ExpansionFit radius_fit(const MetricChart& chart, const Vec& p, const std::vector<double>& radii,
                        const GridPtr& grid, const FitOptions& options, bool volume) {
  require_samples(radii);
  const int n = chart.dim();
  const double alpha = sphere_area(n);
  const double sc = geometry::scalar_curvature(chart, p);
  ExpansionFit out;
  out.observable = volume ? "volume" : "area";
  out.scalar_curvature = sc;
  out.reference = volume ? -(n + 1) * sc / (2.0 * (n - 1) * (n + 2)) : -sc / (2.0 * n);
  out.samples = radii;
  const auto o = solver_of(options, volume);
  std::vector<double> s;
  for (double r : radii) {
    const auto sol = pseudoball::solve_pseudo_ball(chart, p, r, grid, o);
    const double value = volume ? sol.enclosed_volume : sol.area;
    const double euclid = volume ? alpha * std::pow(r, n) / n : alpha * std::pow(r, n - 1);
    out.values.push_back(value);
    out.normalized.push_back(value / euclid);
    s.push_back(r * r);
  }
  finish(out, s);
  return out;
}

pseudoball::VolumeOptions area_only(const FitOptions& options) {
  pseudoball::VolumeOptions v = options.volume;
  v.solver.compute_center = false;
  v.solver.workers = options.workers;
  return v;
}

// Strict "a is better than b": smaller value, or a tie broken by the
// lexicographically smaller chart point.
bool better(double fa, const Vec& a, double fb, const Vec& b) {
  if (std::abs(fa - fb) > 1e-12 * std::max(std::abs(fa), std::abs(fb))) return fa < fb;
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

RiccatiSeries riccati_h_series(const CurvaturePack& curv, const Vec& theta) {
  const int n = curv.dim;
  RiccatiSeries out;
  out.h_minus1 = n - 1;
  const Mat g = curv.metric.size() ? curv.metric : Mat::Identity(n, n);
  const Vec t = theta / std::sqrt(theta.dot(g * theta));
  const auto frame = orthonormal_complement(g, t);
  // U = I/r + U1 r + ...: matching r^0 in U' + U^2 + R = 0 gives 3 U1 = -R.
  double trace = 0.0;
  for (const Vec& e : frame) trace += -riemann_of(curv, e, t, t, e) / 3.0;
  out.h1 = trace;
  return out;
}

std::vector<double> default_radii(const MetricChart& chart) {
  std::vector<double> r{0.30, 0.25, 0.20, 0.15, 0.10, 0.05};
  for (double& x : r) x *= chart.length_scale();
  return r;
}

std::vector<double> default_volumes(const MetricChart& chart) {
  std::vector<double> v = default_radii(chart);
  for (double& x : v) x = ball_volume(chart.dim()) * std::pow(x, chart.dim());
  return v;
}

ExpansionFit fit_area_coefficient(const MetricChart& chart, const Vec& p,
                                  const std::vector<double>& radii, const GridPtr& grid,
                                  const FitOptions& options) {
  return radius_fit(chart, p, radii, grid, options, false);
}

ExpansionFit fit_volume_coefficient(const MetricChart& chart, const Vec& p,
                                    const std::vector<double>& radii, const GridPtr& grid,
                                    const FitOptions& options) {
  return radius_fit(chart, p, radii, grid, options, true);
}

double isoperimetric_constant(int n) {
  return sphere_area(n) / std::pow(ball_volume(n), (n - 1.0) / n);
}

ExpansionFit fit_profile_coefficient(const MetricChart& chart, const Vec& p,
                                     const std::vector<double>& volumes, const GridPtr& grid,
                                     const FitOptions& options) {
  require_samples(volumes);
  const int n = chart.dim();
  const double omega = ball_volume(n);
  const double cn = isoperimetric_constant(n);
  const double sc = geometry::scalar_curvature(chart, p);
  ExpansionFit out;
  out.observable = "profile";
  out.scalar_curvature = sc;
  out.reference = -sc / (2.0 * n * (n + 2));
  out.samples = volumes;
  const auto vo = area_only(options);
  std::vector<double> s;
  for (double v : volumes) {
    const double f = pseudoball::beta(chart, p, v, grid, vo).area;
    out.values.push_back(f);
    out.normalized.push_back(f / (cn * std::pow(v, (n - 1.0) / n)));
    s.push_back(std::pow(v / omega, 2.0 / n));
  }
  finish(out, s);
  return out;
}

std::vector<Vec> scan_lattice(const MetricChart& chart, int points_per_axis, double& step) {
  if (points_per_axis < 1) throw Error(ErrorKind::InvalidArgument, "points_per_axis must be >= 1");
  const int n = chart.dim();
  const int m = points_per_axis;
  double lo = 0.0, width = 1.0;
  bool ball = false;
  if (chart.base() == geometry::BaseKind::FlatTorus) {
    step = 1.0 / m;
  } else if (chart.base() == geometry::BaseKind::Sphere) {
    const double rad = 1.0 / std::sqrt(chart.k0());
    lo = -rad;
    width = 2.0 * rad;
    step = width / m;
    lo += 0.5 * step;
    ball = true;
  } else {
    throw Error(ErrorKind::InvalidArgument,
                "profile scans need a compact base (flat_torus or sphere)");
  }
  std::vector<Vec> out;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= m;
  for (long idx = 0; idx < total; ++idx) {
    Vec x(n);
    long rest = idx;
    for (int i = n - 1; i >= 0; --i) {
      x[i] = lo + step * static_cast<double>(rest % m);
      rest /= m;
    }
    if (ball && x.norm() > 0.5 * width) continue;
    out.push_back(x);
  }
  return out;
}

ProfilePoint profile_scan(const MetricChart& chart, double v, const GridPtr& grid,
                          const ScanOptions& options) {
  ProfilePoint out;
  out.v = v;
  const std::vector<Vec> lattice = scan_lattice(chart, options.points_per_axis, out.grid_step);
  const auto vo = area_only(options.fit);
  // Parallelism goes over centers; each solve runs serially.
  auto inner = vo;
  inner.solver.workers = 1;
  const auto f = [&](const Vec& p) { return pseudoball::beta(chart, p, v, grid, inner).area; };

  std::vector<double> values(lattice.size());
  parallel_for(lattice.size(), options.fit.workers, [&](std::size_t i) { values[i] = f(lattice[i]); });
  std::size_t best = 0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    out.samples.push_back({lattice[i], values[i]});
    if (better(values[i], lattice[i], values[best], lattice[best])) best = i;
  }
  out.grid_samples = lattice.size();

  Vec p = lattice[best];
  double fp = values[best];
  const int n = chart.dim();
  double step = 0.5 * out.grid_step;
  for (int round = 0; round < options.refine_rounds; ++round) {
    std::vector<Vec> probes;
    for (int i = 0; i < n; ++i)
      for (double sgn : {-1.0, 1.0}) {
        Vec q = p;
        q[i] += sgn * step;
        q = chart.wrap(q);
        if (!chart.contains(q)) continue;
        probes.push_back(q);
      }
    std::vector<double> pv(probes.size());
    parallel_for(probes.size(), options.fit.workers, [&](std::size_t i) { pv[i] = f(probes[i]); });
    for (std::size_t i = 0; i < probes.size(); ++i) {
      out.samples.push_back({probes[i], pv[i]});
      if (better(pv[i], probes[i], fp, p)) {
        p = probes[i];
        fp = pv[i];
      }
    }
    out.final_step = step;
    step *= 0.5;
  }
  out.minimizer = p;
  out.value = fp;
  return out;
}

double constant_curvature_reference(double k0, int n, double v) {
  if (n != 2 && n != 3) throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3");
  if (!(v > 0.0)) throw Error(ErrorKind::VolumeOutOfRange, "volume must be positive");
  if (n == 2) {
    const double q = 4.0 * kPi * v - k0 * v * v;
    if (k0 > 0.0 && v > 4.0 * kPi / k0)
      throw Error(ErrorKind::VolumeOutOfRange, fmt("volume %.6g exceeds the sphere", v));
    return std::sqrt(std::max(0.0, q));
  }
  if (k0 == 0.0) return std::cbrt(36.0 * kPi * v * v);
  const double kappa = std::sqrt(std::abs(k0));
  const double k3 = kappa * kappa * kappa;
  const auto volume = [&](double s) {
    const double u = 2.0 * kappa * s;
    return k0 > 0.0 ? kPi * (u - std::sin(u)) / k3 : kPi * (std::sinh(u) - u) / k3;
  };
  double lo = 0.0, hi;
  if (k0 > 0.0) {
    hi = kPi / kappa;
    if (v > volume(hi))
      throw Error(ErrorKind::VolumeOutOfRange, fmt("volume %.6g exceeds the sphere", v));
  } else {
    hi = std::cbrt(3.0 * v / (4.0 * kPi));
    while (volume(hi) < v) hi *= 2.0;
  }
  // Geodesic radius by bisection; V is increasing in s.
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (volume(mid) < v ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  const double a = k0 > 0.0 ? std::sin(kappa * s) : std::sinh(kappa * s);
  return 4.0 * kPi * a * a / (kappa * kappa);
}

void write_fit_csv(std::ostream& out, const ExpansionFit& fit) {
  const bool profile = fit.observable == "profile";
  out << (profile ? "v,f" : "r," + fit.observable) << ",normalized\r\n";
  char buf[96];
  for (std::size_t i = 0; i < fit.samples.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\r\n", fit.samples[i], fit.values[i],
                  fit.normalized[i]);
    out << buf;
  }
}

void write_scan_csv(std::ostream& out, const ProfilePoint& point) {
  const int n = point.minimizer.size() ? static_cast<int>(point.minimizer.size()) : 0;
  out << "v";
  for (int i = 0; i < n; ++i) out << ",x" << (i + 1);
  out << ",f\r\n";
  char buf[64];
  for (const auto& s : point.samples) {
    std::snprintf(buf, sizeof buf, "%.17g", point.v);
    out << buf;
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", s.p[i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\r\n", s.f);
    out << buf;
  }
}

}  // namespace isoprofile::expansion
