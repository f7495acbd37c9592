#include "isoprofile/pseudoball/pseudoball.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "isoprofile/core/error.hpp"
#include "isoprofile/core/parallel.hpp"
#include "isoprofile/geometry/geodesic.hpp"
#include "isoprofile/sphere/sphere_grid.hpp"

namespace isoprofile::pseudoball {

namespace geo = isoprofile::geometry;

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Vec gamma_contract(const geo::Christoffel& g, const Vec& a, const Vec& b) {
  const int n = g.dim;
  Vec out = Vec::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[k] += g(k, i, j) * a[i] * b[j];
  return out;
}

Vec cross_covector(const Vec& a, const Vec& b) {
  Vec c(3);
  c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
  return c;
}

// Frame-component centroid of mu-weighted log_p(z_i) = u_i theta_i, divided by r.
Vec normal_centroid(const sphere::SphereGrid& grid, const SphericalField& x,
                    const SphericalField& sigma) {
  Vec m = Vec::Zero(grid.ambient_dim());
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double mu = grid.weights()[static_cast<Eigen::Index>(i)] * sigma[i];
    m += mu * (1.0 + x[i]) * grid.node(i);
    mass += mu;
  }
  return m / mass;
}

CenterOfMass karcher(const MetricChart& chart, const std::vector<Vec>& points,
                     const std::vector<double>& weights, Vec c,
                     const CenterOfMassOptions& options) {
  double mass = 0.0;
  for (double w : weights) mass += w;
  CenterOfMass out;
  for (int it = 0; it <= options.max_iterations; ++it) {
    Vec m = Vec::Zero(chart.dim());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vec l = options.steps > 0 ? geo::log_map(chart, c, points[i], options.steps)
                                      : geo::log_map(chart, c, points[i]);
      m += weights[i] * l;
    }
    m /= mass;
    out.point = c;
    out.first_order_residual = m.norm();
    out.iterations = it;
    if (out.first_order_residual < options.tol) return out;
    if (it == options.max_iterations) break;
    const int steps = options.steps > 0 ? options.steps : geo::step_count(chart, m.norm());
    c = geo::exp_chart(chart, c, m, steps);
  }
  throw Error(ErrorKind::NoConvergence,
              fmt("center_of_mass: first-order residual %.3e after max iterations",
                  out.first_order_residual));
}

}  // namespace

int default_ray_steps(const MetricChart& chart, double r) {
  return geo::step_count(chart, 1.25 * r);
}

NormalGraph make_graph(const MetricChart& chart, const Vec& p, double r, SphericalField x,
                       int ray_steps) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "graph radius must be positive");
  if (x.grid()->ambient_dim() != chart.dim())
    throw Error(ErrorKind::InvalidArgument, "grid dimension does not match chart");
  if (!(x.max_abs() < 1.0))
    throw Error(ErrorKind::InvalidArgument, "normal graph needs |x| < 1");
  const double u_max = r * (1.0 + x.values().maxCoeff());
  if (u_max > chart.max_radius(p))
    throw Error(ErrorKind::RadiusTooLarge,
                fmt("graph reaches %.6g beyond max radius %.6g", u_max, chart.max_radius(p)));
  NormalGraph g{chart, p, r, std::move(x), ray_steps};
  if (g.ray_steps <= 0) g.ray_steps = default_ray_steps(chart, r);
  return g;
}

GraphGeometry graph_geometry(const NormalGraph& graph, int workers) {
  const MetricChart& chart = graph.chart;
  const auto& grid = *graph.x.grid();
  const int n = chart.dim();
  const auto count = static_cast<Eigen::Index>(grid.size());
  const Mat e = chart.frame(graph.p);

  GraphGeometry out;
  out.points.resize(grid.size());
  std::vector<Vec> disp(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const Vec v = graph.r * (1.0 + graph.x[i]) * grid.node(i);
    const auto end = geo::shoot(chart, graph.p, e * v, graph.ray_steps);
    out.points[i] = end.position;
    disp[i] = end.displacement;
  });

  std::vector<sphere::AngularDerivatives> d(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd comp(count);
    for (Eigen::Index i = 0; i < count; ++i) comp[i] = disp[i][k];
    d[k] = grid.derivatives(comp);
  }

  Eigen::VectorXd h_values(count), s_values(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vec& f = out.points[i];
    const Mat g = chart.metric(f);
    const geo::Christoffel gam = geo::christoffel(chart, f);
    Vec t1(n), t11(n);
    for (int k = 0; k < n; ++k) {
      t1[k] = d[k].d1[i];
      t11[k] = d[k].d11[i];
    }
    if (n == 2) {
      const double h11 = t1.dot(g * t1);
      if (!(h11 > 0.0))
        throw Error(ErrorKind::DegenerateInducedMetric, "induced metric lost positivity");
      Vec w(2);
      w << -t1[1], t1[0];
      w /= std::sqrt(w.dot(g.inverse() * w));
      h_values[i] = w.dot(t11 + gamma_contract(gam, t1, t1)) / h11;
      s_values[i] = std::sqrt(h11);
    } else {
      Vec t2(3), t12(3), t22(3);
      for (int k = 0; k < 3; ++k) {
        t2[k] = d[k].d2[i];
        t12[k] = d[k].d12[i];
        t22[k] = d[k].d22[i];
      }
      Eigen::Matrix2d h;
      h << t1.dot(g * t1), t1.dot(g * t2), t2.dot(g * t1), t2.dot(g * t2);
      const double det = h.determinant();
      if (!(det > 0.0) || !(h(0, 0) > 0.0))
        throw Error(ErrorKind::DegenerateInducedMetric, "induced metric lost positivity");
      Vec w = -cross_covector(t1, t2);
      w /= std::sqrt(w.dot(g.inverse() * w));
      Eigen::Matrix2d second;
      second(0, 0) = w.dot(t11 + gamma_contract(gam, t1, t1));
      second(0, 1) = second(1, 0) = w.dot(t12 + gamma_contract(gam, t1, t2));
      second(1, 1) = w.dot(t22 + gamma_contract(gam, t2, t2));
      h_values[i] = (h.inverse() * second).trace();
      s_values[i] = std::sqrt(det) / grid.area_element(static_cast<std::size_t>(i));
    }
  }
  out.mean_curvature = SphericalField(graph.x.grid(), std::move(h_values));
  out.sigma = SphericalField(graph.x.grid(), std::move(s_values));
  out.area = sphere::integrate(out.sigma);
  return out;
}

SphericalField mean_curvature(const NormalGraph& graph) {
  return graph_geometry(graph).mean_curvature;
}

SphericalField sigma_density(const NormalGraph& graph) { return graph_geometry(graph).sigma; }

SphericalField psi(const MetricChart& chart, const Vec& p, double r, const SphericalField& x) {
  SphericalField h = mean_curvature(make_graph(chart, p, r, x));
  h.values() = (r * h.values().array() - (chart.dim() - 1)).matrix();
  return h;
}

CenterOfMass center_of_mass(const MetricChart& chart, const std::vector<Vec>& points,
                            const std::vector<double>& weights, std::optional<Vec> start,
                            const CenterOfMassOptions& options) {
  if (points.empty() || points.size() != weights.size())
    throw Error(ErrorKind::InvalidArgument, "center_of_mass needs one weight per point");
  Vec c;
  if (start) {
    c = *start;
  } else {
    c = Vec::Zero(chart.dim());
    double mass = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      c += weights[i] * (points[0] + chart.displacement(points[0], points[i]));
      mass += weights[i];
    }
    c /= mass;
  }
  const Eigen::SelfAdjointEigenSolver<Mat> eig(chart.metric(c), Eigen::EigenvaluesOnly);
  const double stretch = std::sqrt(eig.eigenvalues().maxCoeff());
  double diameter = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      diameter = std::max(diameter, chart.displacement(points[i], points[j]).norm());
  if (stretch * diameter >= 0.5 * chart.chart_radius(c))
    throw Error(ErrorKind::InvalidArgument,
                fmt("center_of_mass: point set diameter %.4g too large for chart radius %.4g",
                    stretch * diameter, chart.chart_radius(c)));
  return karcher(chart, points, weights, c, options);
}

Vec A_defect(const MetricChart& chart, const Vec& p, double r, const SphericalField& x) {
  const NormalGraph graph = make_graph(chart, p, r, x);
  const GraphGeometry geom = graph_geometry(graph);
  const auto& grid = *x.grid();
  std::vector<double> mu(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    mu[i] = grid.weights()[static_cast<Eigen::Index>(i)] * geom.sigma[i];
  CenterOfMassOptions opt;
  opt.steps = graph.ray_steps;
  const CenterOfMass com = center_of_mass(chart, geom.points, mu, p, opt);
  return geo::log_map(chart, p, com.point, graph.ray_steps) / r;
}

double r_max(const MetricChart& chart, const Vec& p, double fraction) {
  return fraction * chart.chart_radius(p);
}

double enclosed_volume(const NormalGraph& graph, int t_nodes, int workers) {
  const auto& grid = *graph.x.grid();
  const int n = graph.chart.dim();
  std::vector<double> xi, wxi;
  sphere::gauss_legendre(t_nodes, xi, wxi);
  // Substeps per Gauss interval scale with the graph's ray step count so
  // every ray shares one discretization pattern.
  std::vector<int> plan(t_nodes);
  double prev = -1.0;
  for (int k = 0; k < t_nodes; ++k) {
    plan[k] = std::max(1, static_cast<int>(std::ceil(graph.ray_steps * (xi[k] - prev) / 2.0)));
    prev = xi[k];
  }
  std::vector<double> per_ray(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const double u = graph.r * (1.0 + graph.x[i]);
    std::vector<double> t(t_nodes);
    for (int k = 0; k < t_nodes; ++k) t[k] = 0.5 * u * (1.0 + xi[k]);
    const auto lambda = geo::radial_densities(graph.chart, graph.p, grid.node(i), t, plan);
    double s = 0.0;
    for (int k = 0; k < t_nodes; ++k) s += wxi[k] * lambda[k] * std::pow(t[k], n - 1);
    per_ray[i] = 0.5 * u * s;
  });
  double v = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    v += grid.weights()[static_cast<Eigen::Index>(i)] * per_ray[i];
  return v;
}

PseudoBallSolution solve_pseudo_ball(const MetricChart& chart, const Vec& p, double r,
                                     const GridPtr& grid, const SolverOptions& options) {
  const int n = chart.dim();
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "r must be positive");
  const double rmax = r_max(chart, p, options.r_max_fraction);
  if (r > rmax)
    throw Error(ErrorKind::RadiusTooLarge, fmt("r = %.6g exceeds r_max = %.6g", r, rmax));
  if (grid->ambient_dim() != n)
    throw Error(ErrorKind::InvalidArgument, "grid dimension does not match chart");
  const int steps = options.ray_steps > 0 ? options.ray_steps : default_ray_steps(chart, r);
  const double target = 0.1 * options.tol;

  SphericalField x = options.initial_x ? *options.initial_x : SphericalField::constant(grid, 0.0);
  SphericalField x_prev = x;
  double prev_res = std::numeric_limits<double>::infinity();
  int damping = 0;

  PseudoBallSolution sol;
  GraphGeometry geom;
  for (int it = 0;; ++it) {
    NormalGraph graph;
    try {
      graph = make_graph(chart, p, r, x, steps);
      geom = graph_geometry(graph, options.workers);
    } catch (const Error& e) {
      if (it == 0) throw;
      throw Error(ErrorKind::NoConvergence,
                  std::string("pseudo-ball iteration left the admissible set: ") + e.what());
    }
    SphericalField psi_field = geom.mean_curvature;
    psi_field.values() = (r * psi_field.values().array() - (n - 1)).matrix();
    const SphericalField q = sphere::project_Q(psi_field);
    const Vec a = normal_centroid(*grid, x, geom.sigma);
    const double res_q = q.max_abs(), res_a = a.norm();
    const double res = std::max(res_q, res_a);

    // Converged, or stalled at the round-off floor below tol.
    const bool done = res < target || (res < options.tol && res > 0.5 * prev_res);
    if (!done && res > prev_res && damping < 4 && it < options.max_iterations) {
      // Halve the last step and retry.
      x = 0.5 * (x + x_prev);
      ++damping;
      continue;
    }
    damping = 0;
    sol.graph = std::move(graph);
    sol.residual_Q = res_q;
    sol.residual_A = res_a;
    sol.iterations = it;
    if (done) break;
    if (it >= options.max_iterations) {
      if (res < options.tol) break;
      throw Error(ErrorKind::NoConvergence,
                  fmt("pseudo-ball solve: residual Q %.3e, A %.3e after max iterations", res_q,
                      res_a));
    }
    SphericalField step = sphere::solve_L(q, 1e-8);
    for (std::size_t i = 0; i < grid->size(); ++i)
      step.values()[static_cast<Eigen::Index>(i)] += a.dot(grid->node(i));
    x_prev = x;
    prev_res = res;
    x -= step;
  }

  sol.area = geom.area;
  const auto& g = *grid;
  if (options.compute_center) {
    std::vector<double> mu(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      mu[i] = g.weights()[static_cast<Eigen::Index>(i)] * geom.sigma[i];
    CenterOfMassOptions copt;
    copt.steps = steps;
    const CenterOfMass com = karcher(chart, geom.points, mu, p, copt);
    sol.center_of_mass = chart.wrap(com.point);
    sol.residual_A = (geo::log_map(chart, p, com.point, steps) / r).norm();
  } else {
    sol.center_of_mass = p;
  }
  if (options.compute_volume) {
    sol.enclosed_volume = enclosed_volume(sol.graph, options.volume_nodes, options.workers);
    sol.rho = std::pow(sol.enclosed_volume / ball_volume(n), 1.0 / n);
  }
  return sol;
}

double radius_for_volume(const MetricChart& chart, const Vec& p, double v, const GridPtr& grid,
                         const VolumeOptions& options) {
  const int n = chart.dim();
  if (!(v > 0.0)) throw Error(ErrorKind::VolumeOutOfRange, "volume must be positive");
  const double rmax = r_max(chart, p, options.solver.r_max_fraction);
  SolverOptions inner = options.solver;
  inner.compute_center = false;
  inner.compute_volume = true;

  double s = std::pow(v / ball_volume(n), 1.0 / n);  // Euclidean guess
  if (inner.ray_steps <= 0) inner.ray_steps = default_ray_steps(chart, std::min(rmax, 1.5 * s));

  const auto eval = [&](double r) {
    const PseudoBallSolution sol = solve_pseudo_ball(chart, p, r, grid, inner);
    inner.initial_x = sol.graph.x;
    return std::log(sol.enclosed_volume / v);
  };

  // Secant on log V against log r; the slope is n in the Euclidean limit.
  double r0 = std::min(s, rmax);
  double f0 = eval(r0);
  if (std::abs(f0) <= options.rel_tol) return r0;
  if (r0 == rmax && f0 < 0.0)
    throw Error(ErrorKind::VolumeOutOfRange,
                fmt("volume %.6g exceeds the largest pseudo-ball at r_max = %.6g", v, rmax));
  double lo = 0.0, hi = f0 > 0.0 ? r0 : rmax;
  if (f0 < 0.0) lo = r0;
  double r1 = r0 * std::exp(-f0 / n);
  double slope = n;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (r1 >= hi || r1 <= lo) r1 = lo > 0.0 ? 0.5 * (lo + hi) : 0.5 * hi;
    if (r1 > rmax) r1 = rmax;
    const double f1 = eval(r1);
    if (std::abs(f1) <= options.rel_tol) return r1;
    if (f1 > 0.0) hi = std::min(hi, r1);
    else lo = std::max(lo, r1);
    if (r1 == rmax && f1 < 0.0)
      throw Error(ErrorKind::VolumeOutOfRange,
                  fmt("volume %.6g exceeds the largest pseudo-ball at r_max = %.6g", v, rmax));
    const double dl = std::log(r1) - std::log(r0);
    if (dl != 0.0 && f1 != f0) slope = (f1 - f0) / dl;
    if (!(slope > 0.0)) slope = n;
    r0 = r1;
    f0 = f1;
    r1 = r0 * std::exp(-f1 / slope);
  }
  throw Error(ErrorKind::NoConvergence, fmt("radius_for_volume: no convergence for v = %.6g", v));
}

PseudoBallSolution beta(const MetricChart& chart, const Vec& p, double v, const GridPtr& grid,
                        const VolumeOptions& options) {
  const double r = radius_for_volume(chart, p, v, grid, options);
  SolverOptions final_opt = options.solver;
  if (final_opt.ray_steps <= 0) {
    const double s = std::pow(v / ball_volume(chart.dim()), 1.0 / chart.dim());
    final_opt.ray_steps =
        default_ray_steps(chart, std::min(r_max(chart, p, final_opt.r_max_fraction), 1.5 * s));
  }
  return solve_pseudo_ball(chart, p, r, grid, final_opt);
}

PseudoBallSolution beta_rho(const MetricChart& chart, const Vec& p, double rho,
                            const GridPtr& grid, const VolumeOptions& options) {
  if (!(rho > 0.0)) throw Error(ErrorKind::VolumeOutOfRange, "rho must be positive");
  return beta(chart, p, ball_volume(chart.dim()) * std::pow(rho, chart.dim()), grid, options);
}

}  // namespace isoprofile::pseudoball
