// isoprofile: pseudo-balls, expansion fits, profile scans and grid Monte Carlo.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isoprofile/cli/commands.hpp"
#include "isoprofile/core/parallel.hpp"

namespace {

using isoprofile::cli::RunConfig;

struct Flags {
  std::string config;
  std::optional<std::string> metric, conformal, out, domain;
  std::optional<double> k0, radius, volume, tol, mesh;
  std::optional<int> dim, grid, workers, scan_points, refine_rounds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::vector<double> point, radii, volumes, offset;
  bool no_meta = false, strict = false;
};

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON config file; flags override its values");
  app.add_option("--metric", f.metric, "euclidean | sphere | hyperbolic | torus");
  app.add_option("--k0", f.k0, "curvature of the sphere or hyperbolic base");
  app.add_option("--dim", f.dim, "dimension, 2 or 3");
  app.add_option("--conformal", f.conformal, "log conformal factor in x1..xn");
  app.add_option("--point", f.point, "base point (chart coordinates)")->delimiter(',');
  app.add_option("--radius", f.radius, "pseudo-ball parameter r");
  app.add_option("--radii", f.radii, "strictly decreasing fit radii")->delimiter(',');
  app.add_option("--volume", f.volume, "enclosed volume");
  app.add_option("--volumes", f.volumes, "strictly decreasing fit volumes")->delimiter(',');
  app.add_option("--grid", f.grid, "spherical harmonic degree");
  app.add_option("--tol", f.tol, "solver tolerance");
  app.add_option("--seed", f.seed, "Monte Carlo seed");
  app.add_option("--workers", f.workers, "worker threads");
  app.add_option("--out", f.out, "directory for JSON and CSV files");
  app.add_flag("--no-meta", f.no_meta, "omit the timestamped meta block");
  app.add_flag("--strict", f.strict, "double the geodesic step density");
  app.add_option("--scan-points", f.scan_points, "profile scan lattice points per axis");
  app.add_option("--refine-rounds", f.refine_rounds, "profile scan refinement rounds");
  app.add_option("--domain", f.domain, "disk | square | polygon (vertices from --config)");
  app.add_option("--mesh", f.mesh, "grid mesh");
  app.add_option("--samples", f.samples, "Monte Carlo offsets");
  app.add_option("--offset", f.offset, "grid offset for a split report")->delimiter(',')->expected(2);
}

RunConfig build_config(const Flags& f) {
  RunConfig c;
  c.workers = isoprofile::default_workers();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in)
      throw isoprofile::Error(isoprofile::ErrorKind::InvalidArgument,
                              "cannot read config '" + f.config + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw isoprofile::ParseError(isoprofile::ErrorKind::SyntaxError, "config: " + std::string(e.what()),
                                   e.byte);
    }
    const int fallback_workers = c.workers;
    c = isoprofile::cli::config_from_json(j);
    if (!j.contains("workers")) c.workers = fallback_workers;
  }
  if (f.metric) c.metric.base = *f.metric == "flat_torus" ? "torus" : *f.metric;
  if (f.k0) c.metric.k0 = *f.k0;
  if (f.dim) c.metric.dim = *f.dim;
  if (f.conformal) c.metric.conformal = *f.conformal;
  if (!f.point.empty()) c.point = f.point;
  if (f.radius) c.radius = *f.radius;
  if (!f.radii.empty()) c.radii = f.radii;
  if (f.volume) c.volume = *f.volume;
  if (!f.volumes.empty()) c.volumes = f.volumes;
  if (f.grid) c.grid = *f.grid;
  if (f.tol) c.tol = *f.tol;
  if (f.seed) c.seed = *f.seed;
  if (f.workers) c.workers = *f.workers;
  if (f.out) c.out = *f.out;
  if (f.no_meta) c.no_meta = true;
  if (f.strict) c.strict = true;
  if (f.scan_points) c.scan_points = *f.scan_points;
  if (f.refine_rounds) c.refine_rounds = *f.refine_rounds;
  if (f.domain) c.domain = *f.domain;
  if (f.mesh) c.mesh = *f.mesh;
  if (f.samples) c.samples = *f.samples;
  if (f.offset.size() == 2) c.offset = std::array<double, 2>{f.offset[0], f.offset[1]};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-balls and the small-volume isoperimetric profile"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"pseudoball", "solve one pseudo-ball (by --radius or --volume)"},
      {"expand", "fit the area, volume and profile expansion coefficients"},
      {"profile", "scan f(p, v) over centres and minimize"},
      {"partition", "Monte Carlo check of the grid averaging identity"},
      {"selftest", "run the acceptance criteria"}};
  for (const auto& [name, help] : commands) add_flags(*app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << isoprofile::cli::error_line("InvalidArgument", e.what()) << "\n";
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  RunConfig config;
  try {
    config = build_config(flags);
  } catch (const isoprofile::Error& e) {
    std::cerr << isoprofile::cli::error_line(e) << "\n";
    return isoprofile::cli::exit_code_for(e.kind());
  }
  return isoprofile::cli::run(command, config, std::cout, std::cerr);
}
