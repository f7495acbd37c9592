#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isoprofile/geometry/metric_chart.hpp"

namespace isoprofile::cli {

struct MetricSpec {
  std::string base = "euclidean";  // euclidean | sphere | hyperbolic | torus
  std::optional<double> k0;        // default +1 (sphere) or -1 (hyperbolic)
  int dim = 2;
  std::string conformal;  // log conformal factor in x1..xn, empty for none
};

struct RunConfig {
  MetricSpec metric;
  std::vector<double> point;  // default: chart origin, torus centre
  std::optional<double> radius;
  std::optional<double> volume;
  std::vector<double> radii;    // empty: default radii
  std::vector<double> volumes;  // empty: default volumes
  int grid = 16;                // spherical harmonic degree
  double tol = 1e-9;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;  // output directory, empty for stdout only
  bool no_meta = false;
  bool strict = false;

  int scan_points = 8;
  int refine_rounds = 10;

  std::string domain = "disk";  // disk | square | polygon
  std::vector<std::array<double, 2>> polygon;
  double mesh = 5.0;
  std::size_t samples = 100000;
  std::optional<std::array<double, 2>> offset;  // adds a split report
};

/// Reads the nested "metric" table and flat parameter keys. Unknown keys
/// are rejected with InvalidArgument.
RunConfig config_from_json(const nlohmann::json& j);

/// Checks ranges and orderings; throws InvalidArgument (or the parser's
/// errors for the conformal expression).
void validate(const RunConfig& config);

geometry::MetricChart build_chart(const RunConfig& config);

/// Base point as a chart vector (defaults applied).
Vec base_point(const RunConfig& config);

}  // namespace isoprofile::cli
