#include "isoprofile/cli/config.hpp"

#include <cmath>

#include "isoprofile/cli/expression.hpp"
#include "isoprofile/core/error.hpp"

namespace isoprofile::cli {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); }

template <class T>
T get(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    invalid("config key '" + key + "' has the wrong type");
  }
}

void strictly_decreasing(const std::vector<double>& v, const std::string& name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) invalid(name + " must be positive");
    if (i > 0 && !(v[i] < v[i - 1])) invalid(name + " must be strictly decreasing");
  }
}

}  // namespace

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) invalid("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "metric") {
      if (!value.is_object()) invalid("config key 'metric' must be a table");
      for (const auto& [mk, mv] : value.items()) {
        const std::string name = "metric." + mk;
        if (mk == "base") c.metric.base = get<std::string>(mv, name);
        else if (mk == "k0") c.metric.k0 = get<double>(mv, name);
        else if (mk == "dim") c.metric.dim = get<int>(mv, name);
        else if (mk == "conformal") c.metric.conformal = get<std::string>(mv, name);
        else invalid("unknown config key '" + name + "'");
      }
    } else if (key == "point") c.point = get<std::vector<double>>(value, key);
    else if (key == "radius") c.radius = get<double>(value, key);
    else if (key == "volume") c.volume = get<double>(value, key);
    else if (key == "radii") c.radii = get<std::vector<double>>(value, key);
    else if (key == "volumes") c.volumes = get<std::vector<double>>(value, key);
    else if (key == "grid") c.grid = get<int>(value, key);
    else if (key == "tol") c.tol = get<double>(value, key);
    else if (key == "seed") c.seed = get<std::uint64_t>(value, key);
    else if (key == "workers") c.workers = get<int>(value, key);
    else if (key == "out") c.out = get<std::string>(value, key);
    else if (key == "no_meta") c.no_meta = get<bool>(value, key);
    else if (key == "strict") c.strict = get<bool>(value, key);
    else if (key == "scan_points") c.scan_points = get<int>(value, key);
    else if (key == "refine_rounds") c.refine_rounds = get<int>(value, key);
    else if (key == "domain") c.domain = get<std::string>(value, key);
    else if (key == "polygon") c.polygon = get<std::vector<std::array<double, 2>>>(value, key);
    else if (key == "mesh") c.mesh = get<double>(value, key);
    else if (key == "samples") c.samples = get<std::size_t>(value, key);
    else if (key == "offset") c.offset = get<std::array<double, 2>>(value, key);
    else invalid("unknown config key '" + key + "'");
  }
  return c;
}

void validate(const RunConfig& c) {
  const auto& m = c.metric;
  if (m.dim != 2 && m.dim != 3) invalid("metric.dim must be 2 or 3");
  if (m.base != "euclidean" && m.base != "sphere" && m.base != "hyperbolic" && m.base != "torus")
    invalid("metric.base must be euclidean, sphere, hyperbolic or torus");
  if (m.base == "sphere" && m.k0 && !(*m.k0 > 0.0)) invalid("sphere needs k0 > 0");
  if (m.base == "hyperbolic" && m.k0 && !(*m.k0 < 0.0)) invalid("hyperbolic needs k0 < 0");
  if ((m.base == "euclidean" || m.base == "torus") && m.k0 && *m.k0 != 0.0)
    invalid("k0 applies only to sphere and hyperbolic bases");
  if (!m.conformal.empty()) parse_expression(m.conformal, m.dim);
  if (!c.point.empty() && static_cast<int>(c.point.size()) != m.dim)
    invalid("point must have metric.dim coordinates");
  if (c.radius && !(*c.radius > 0.0)) invalid("radius must be positive");
  if (c.volume && !(*c.volume > 0.0)) invalid("volume must be positive");
  strictly_decreasing(c.radii, "radii");
  strictly_decreasing(c.volumes, "volumes");
  if (c.grid < 2 || c.grid > 64) invalid("grid must be in [2, 64]");
  if (!(c.tol > 0.0)) invalid("tol must be positive");
  if (c.workers < 1) invalid("workers must be at least 1");
  if (c.scan_points < 1) invalid("scan_points must be at least 1");
  if (c.refine_rounds < 0) invalid("refine_rounds must be nonnegative");
  if (c.domain != "disk" && c.domain != "square" && c.domain != "polygon")
    invalid("domain must be disk, square or polygon");
  if (c.domain == "polygon" && c.polygon.size() < 3) invalid("polygon needs 3 vertices");
  if (!(c.mesh > 0.0)) invalid("mesh must be positive");
  if (c.samples < 100) invalid("samples must be at least 100");
}

geometry::MetricChart build_chart(const RunConfig& c) {
  using geometry::MetricChart;
  const auto& m = c.metric;
  MetricChart chart;
  if (m.base == "euclidean") chart = MetricChart::euclidean(m.dim);
  else if (m.base == "sphere") chart = MetricChart::sphere_stereographic(m.dim, m.k0.value_or(1.0));
  else if (m.base == "hyperbolic") chart = MetricChart::hyperbolic_poincare(m.dim, m.k0.value_or(-1.0));
  else if (m.base == "torus") chart = MetricChart::flat_torus(m.dim);
  else invalid("unknown metric base '" + m.base + "'");
  if (!m.conformal.empty()) {
    const Expression e = parse_expression(m.conformal, m.dim);
    chart = MetricChart::conformal(chart, to_log_factor(e), e.to_string());
  }
  if (c.strict) chart = chart.with_steps_per_unit(2 * chart.steps_per_unit());
  return chart;
}

Vec base_point(const RunConfig& c) {
  const int n = c.metric.dim;
  if (!c.point.empty()) {
    if (static_cast<int>(c.point.size()) != n) invalid("point must have metric.dim coordinates");
    return Eigen::Map<const Eigen::VectorXd>(c.point.data(), n);
  }
  return c.metric.base == "torus" ? Vec::Constant(n, 0.5) : Vec::Zero(n);
}

}  // namespace isoprofile::cli
