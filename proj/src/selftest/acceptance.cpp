#include "isoprofile/selftest/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "isoprofile/cli/expression.hpp"
#include "isoprofile/core/error.hpp"
#include "isoprofile/expansion/expansion.hpp"
#include "isoprofile/partition/partition.hpp"
#include "isoprofile/pseudoball/pseudoball.hpp"

namespace isoprofile::selftest {

namespace {

using geometry::MetricChart;
using pseudoball::solve_pseudo_ball;
using sphere::SphericalField;

struct Detail {
  std::ostringstream s;
  bool ok = true;

  // Records one comparison; `pass` decides, the text explains.
  void check(bool pass, const std::string& label, double value, const std::string& bound) {
    if (s.tellp() > 0) s << "; ";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    s << label << " = " << buf << " (" << bound << ")" << (pass ? "" : " FAIL");
    ok = ok && pass;
  }
};

std::string bound_str(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Smooth periodic bump on the unit torus with its maximum at (0.5, 0.5).
MetricChart periodic_bump_torus() {
  const auto e = cli::parse_expression(
      "0.1*exp(1.25*(cos(6.283185307179586*(x1 - 0.5)) + cos(6.283185307179586*(x2 - 0.5)) - 2))", 2);
  return MetricChart::conformal(MetricChart::flat_torus(2), cli::to_log_factor(e), e.to_string());
}

// Rotationally symmetric Gaussian about (0.5, 0.5); a surface of revolution
// near its axis.
MetricChart radial_bump_torus() {
  const auto e = cli::parse_expression("0.1*exp(-((x1 - 0.5)^2 + (x2 - 0.5)^2)/0.04)", 2);
  return MetricChart::conformal(MetricChart::flat_torus(2), cli::to_log_factor(e), e.to_string());
}

double non_constant_content(const SphericalField& x) {
  const Eigen::VectorXd c = x.coefficients();
  return c.tail(c.size() - 1).cwiseAbs().maxCoeff();
}

double rel(double value, double target) { return std::abs(value - target) / std::abs(target); }

pseudoball::SolverOptions shape_only() {
  pseudoball::SolverOptions o;
  o.compute_center = false;
  o.compute_volume = false;
  return o;
}

void criterion1(Detail& d) {
  double x_inf = 0.0, area_err = 0.0, vol_err = 0.0;
  for (int n : {2, 3}) {
    const auto chart = MetricChart::euclidean(n);
    const auto grid = sphere::make_grid(n);
    for (double r : {0.05, 0.1, 0.2}) {
      const auto s = solve_pseudo_ball(chart, Vec::Zero(n), r, grid);
      x_inf = std::max(x_inf, s.graph.x.max_abs());
      area_err = std::max(area_err, rel(s.area, sphere_area(n) * std::pow(r, n - 1)));
      vol_err = std::max(vol_err, std::abs(s.enclosed_volume - ball_volume(n) * std::pow(r, n)));
    }
  }
  d.check(x_inf < 1e-8, "max |x|inf", x_inf, "< 1e-8");
  d.check(area_err < 1e-8, "max area rel err", area_err, "< 1e-8");
  d.check(vol_err < 1e-8, "max volume err", vol_err, "< 1e-8");
  d.s << "; n in {2,3}, r in {0.05,0.1,0.2}";
}

void criterion2(Detail& d) {
  const auto grid = sphere::make_grid(2);
  const double r = 0.3;
  const struct {
    const char* name;
    MetricChart chart;
    double exact;
  } cases[] = {{"S2", MetricChart::sphere_stereographic(2, 1.0), std::atan(r) / r - 1.0},
               {"H2", MetricChart::hyperbolic_poincare(2, -1.0), std::atanh(r) / r - 1.0}};
  for (const auto& c : cases) {
    const auto s = solve_pseudo_ball(c.chart, v2(0, 0), r, grid);
    d.check(non_constant_content(s.graph.x) < 1e-7, std::string(c.name) + " non-constant",
            non_constant_content(s.graph.x), "< 1e-7");
    const double err = (s.graph.x.values().array() - c.exact).abs().maxCoeff();
    d.check(err < 1e-6, std::string(c.name) + " |x - closed form|", err, "< 1e-6");
  }
}

void fit_check(Detail& d, const std::string& tag, const expansion::ExpansionFit& f, double target,
               double tol) {
  d.check(rel(f.coefficient, target) < tol, tag, f.coefficient,
          bound_str("target %g", target) + bound_str(" within %g%%", 100 * tol));
}

void criterion3(Detail& d) {
  const auto g2 = sphere::make_grid(2), g3 = sphere::make_grid(3);
  const auto s2 = MetricChart::sphere_stereographic(2, 1.0);
  const auto h2 = MetricChart::hyperbolic_poincare(2, -1.0);
  const auto s3 = MetricChart::sphere_stereographic(3, 1.0);
  using expansion::default_radii;
  using expansion::fit_area_coefficient;
  fit_check(d, "S2 c2", fit_area_coefficient(s2, v2(0, 0), default_radii(s2), g2), -0.5, 0.01);
  fit_check(d, "H2 c2", fit_area_coefficient(h2, v2(0, 0), default_radii(h2), g2), 0.5, 0.01);
  fit_check(d, "S3 c2", fit_area_coefficient(s3, Vec::Zero(3), default_radii(s3), g3), -1.0, 0.01);
}

void criterion4(Detail& d) {
  const auto g2 = sphere::make_grid(2), g3 = sphere::make_grid(3);
  const auto s2 = MetricChart::sphere_stereographic(2, 1.0);
  const auto s3 = MetricChart::sphere_stereographic(3, 1.0);
  using expansion::default_radii;
  using expansion::fit_volume_coefficient;
  fit_check(d, "S2 gamma", fit_volume_coefficient(s2, v2(0, 0), default_radii(s2), g2), -0.75, 0.02);
  fit_check(d, "S3 gamma", fit_volume_coefficient(s3, Vec::Zero(3), default_radii(s3), g3), -1.2, 0.02);
}

void criterion5(Detail& d, int workers) {
  const auto g2 = sphere::make_grid(2), g3 = sphere::make_grid(3);
  const auto s2 = MetricChart::sphere_stereographic(2, 1.0);
  const auto s3 = MetricChart::sphere_stereographic(3, 1.0);
  using expansion::default_volumes;
  using expansion::fit_profile_coefficient;
  fit_check(d, "S2 a_p", fit_profile_coefficient(s2, v2(0, 0), default_volumes(s2), g2), -0.125, 0.02);
  fit_check(d, "S3 a_p", fit_profile_coefficient(s3, Vec::Zero(3), default_volumes(s3), g3), -0.2, 0.02);
  expansion::ScanOptions scan;
  scan.points_per_axis = 3;
  scan.refine_rounds = 1;
  scan.fit.workers = workers;
  for (double v : {0.05, 0.1, 0.3, 0.5}) {
    const auto pt = expansion::profile_scan(s2, v, g2, scan);
    const double exact = std::sqrt(4 * kPi * v - v * v);
    d.check(rel(pt.value, exact) < 1e-4, "I(" + bound_str("%g", v) + ") rel err",
            rel(pt.value, exact), "< 1e-4");
  }
}

void criterion6(Detail& d) {
  const auto chart = periodic_bump_torus();
  const auto grid = sphere::make_grid(2);
  const Vec p = v2(0.42, 0.55);
  const auto curv = geometry::curvature_at(chart, p);
  const Mat e = chart.frame(p);
  const auto rhs = SphericalField::from_function(
      grid, [&](const Vec& theta) { return curv.ricci_of(e * theta) / 3.0; });
  const SphericalField x2 = sphere::solve_L(sphere::project_Q(rhs));
  double err[2];
  const double radii[2] = {0.1, 0.05};
  for (int k = 0; k < 2; ++k) {
    const auto s = solve_pseudo_ball(chart, p, radii[k], grid, shape_only());
    err[k] = (s.graph.x.values() / (radii[k] * radii[k]) - x2.values()).cwiseAbs().maxCoeff();
  }
  const double ratio = err[1] / err[0];
  d.check(ratio >= 0.3 && ratio <= 0.7, "error ratio r=0.05/r=0.1", ratio, "in [0.3, 0.7]");
  d.s << bound_str("; err(0.1) = %.4g", err[0]) << bound_str(", err(0.05) = %.4g", err[1]);
}

double series_residual(const MetricChart& chart, const Vec& p, double r, const sphere::GridPtr& g) {
  const auto curv = geometry::curvature_at(chart, p);
  const auto h = pseudoball::mean_curvature(
      pseudoball::make_graph(chart, p, r, SphericalField::constant(g, 0.0)));
  const Mat e = chart.frame(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const auto s = expansion::riccati_h_series(curv, e * g->node(i));
    worst = std::max(worst, std::abs(h[i] - (s.h_minus1 / r + s.h1 * r)));
  }
  return worst;
}

void criterion7(Detail& d) {
  const auto grid = sphere::make_grid(2);
  const struct {
    const char* name;
    MetricChart chart;
    Vec p;
  } cases[] = {{"S2", MetricChart::sphere_stereographic(2, 1.0), v2(0, 0)},
               {"H2", MetricChart::hyperbolic_poincare(2, -1.0), v2(0, 0)},
               {"bump", periodic_bump_torus(), v2(0.42, 0.55)}};
  for (const auto& c : cases) {
    const double ratio =
        series_residual(c.chart, c.p, 0.1, grid) / series_residual(c.chart, c.p, 0.05, grid);
    d.check(ratio >= 3.0 && ratio <= 5.0, std::string(c.name) + " residual ratio", ratio,
            "in [3, 5]");
  }
}

// Coordinate search maximizing Sc with the same lattice and step schedule
// as profile_scan.
Vec scalar_curvature_argmax(const MetricChart& chart, int points, int rounds) {
  double step = 0.0;
  const auto lattice = expansion::scan_lattice(chart, points, step);
  Vec best = lattice[0];
  double fb = geometry::scalar_curvature(chart, best);
  for (const Vec& q : lattice) {
    const double f = geometry::scalar_curvature(chart, q);
    if (f > fb) {
      fb = f;
      best = q;
    }
  }
  double h = 0.5 * step;
  for (int k = 0; k < rounds; ++k, h *= 0.5) {
    const Vec c = best;
    for (int i = 0; i < chart.dim(); ++i)
      for (double sgn : {-1.0, 1.0}) {
        Vec q = c;
        q[i] += sgn * h;
        q = chart.wrap(q);
        const double f = geometry::scalar_curvature(chart, q);
        if (f > fb) {
          fb = f;
          best = q;
        }
      }
  }
  return best;
}

void criterion8(Detail& d, int workers) {
  const auto chart = periodic_bump_torus();
  const auto grid = sphere::make_grid(2);
  expansion::ScanOptions scan;
  scan.fit.workers = workers;
  const double v = 1e-3 * ball_volume(2);
  const auto pt = expansion::profile_scan(chart, v, grid, scan);
  const Vec oracle = scalar_curvature_argmax(chart, scan.points_per_axis, scan.refine_rounds);
  const double dist = chart.displacement(oracle, pt.minimizer).norm();
  const double cell = pt.grid_step / 32.0;
  d.check(dist <= cell, "|minimizer - argmax Sc|", dist, bound_str("<= grid_step/2^5 = %g", cell));
  d.s << "; minimizer = (" << pt.minimizer[0] << ", " << pt.minimizer[1] << ")";
}

void criterion9(Detail& d, int workers) {
  using namespace partition;
  const struct {
    const char* name;
    PlanarDomain domain;
  } cases[] = {{"disk", PlanarDomain::disk(Point(0, 0), 1.0)},
               {"square", PlanarDomain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}})}};
  for (const auto& c : cases)
    for (double mesh : {2.0, 5.0}) {
      const auto a = average_over_grids(c.domain, mesh, 100000, 7, workers);
      const double dev = std::abs(a.estimate - a.reference);
      d.check(dev <= a.half_width, std::string(c.name) + " mesh " + bound_str("%g", mesh) + " |est - ref|",
              dev, bound_str("<= CI %.4g", a.half_width));
    }
}

void criterion10(Detail& d) {
  using namespace partition;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int m = 5 + static_cast<int>(u(rng) * 20);
    std::vector<double> angles(static_cast<std::size_t>(m));
    for (double& a : angles) a = 2 * kPi * u(rng);
    std::sort(angles.begin(), angles.end());
    const Point c(u(rng), u(rng));
    std::vector<Point> verts;
    for (double a : angles) verts.push_back(c + (0.3 + 0.7 * u(rng)) * Point(std::cos(a), std::sin(a)));
    const double mesh = 0.15 + 0.35 * u(rng);
    const GridSample g{mesh, Point(mesh * u(rng), mesh * u(rng))};
    worst = std::max(worst, std::abs(split_by_grid(PlanarDomain::polygon(verts), g).defect));
  }
  d.check(worst < 1e-9, "max |sum perimeters - perimeter - 2 grid length| over 50 polygons", worst,
          "< 1e-9");
}

void criterion11(Detail& d) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const int parts = 1 + static_cast<int>(u(rng) * 20);
    std::vector<double> f(static_cast<std::size_t>(parts));
    double sum = 0.0;
    for (double& x : f) sum += (x = -std::log(1.0 - u(rng)));
    for (double& x : f) x /= sum;
    const int n = 2 + k % 2;
    if (!partition::largest_fraction_bound(f, n).holds) ++violations;
  }
  d.check(violations == 0, "violations in 10^4 partitions", violations, "== 0");
}

void criterion12(Detail& d) {
  const auto grid = sphere::make_grid(2);
  const struct {
    const char* name;
    MetricChart chart;
    Vec p;
    double r;
  } cases[] = {{"S2", MetricChart::sphere_stereographic(2, 1.0), v2(0, 0), 0.3},
               {"H2", MetricChart::hyperbolic_poincare(2, -1.0), v2(0, 0), 0.3},
               {"torus radial bump", radial_bump_torus(), v2(0.5, 0.5), 0.1}};
  for (const auto& c : cases) {
    const auto s = solve_pseudo_ball(c.chart, c.p, c.r, grid, shape_only());
    d.check(non_constant_content(s.graph.x) < 1e-8, std::string(c.name) + " asymmetric modes",
            non_constant_content(s.graph.x), "< 1e-8");
  }
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  const int w = std::max(1, options.workers);
  const std::vector<std::pair<std::string, std::function<void(Detail&)>>> criteria = {
      {"flat baseline", criterion1},
      {"constant-curvature pseudo-balls", criterion2},
      {"area coefficient -Sc/(2n)", criterion3},
      {"volume coefficient gamma_n", criterion4},
      {"profile coefficient a_p and sphere profile", [w](Detail& d) { criterion5(d, w); }},
      {"first-order term x2 = solve_L(Q(Ric/3))", criterion6},
      {"mean curvature series remainder O(r^2)", criterion7},
      {"profile minimizer at the Sc maximum", [w](Detail& d) { criterion8(d, w); }},
      {"grid averaging identity", [w](Detail& d) { criterion9(d, w); }},
      {"perimeter splitting identity", criterion10},
      {"largest fraction inequality", criterion11},
      {"equivariance at symmetric centres", criterion12},
  };
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), id) == options.only.end())
      continue;
    CriterionResult r;
    r.id = id;
    r.name = criteria[static_cast<std::size_t>(id - 1)].first;
    Detail d;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[static_cast<std::size_t>(id - 1)].second(d);
      r.passed = d.ok;
      r.detail = d.s.str();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = d.s.str() + (d.s.tellp() > 0 ? "; " : "") + "error: " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "criterion %2d %s  ", r.id, r.passed ? "PASS" : "FAIL");
  char tail[32];
  std::snprintf(tail, sizeof tail, " [%.1fs]", r.seconds);
  return head + r.name + " | " + r.detail + tail;
}

}  // namespace isoprofile::selftest
