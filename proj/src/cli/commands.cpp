#include "isoprofile/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "isoprofile/expansion/expansion.hpp"
#include "isoprofile/partition/partition.hpp"
#include "isoprofile/pseudoball/pseudoball.hpp"
#include "isoprofile/selftest/acceptance.hpp"

namespace isoprofile::cli {

namespace {

using nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

ordered_json to_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json metric_json(const RunConfig& c, const geometry::MetricChart& chart) {
  ordered_json m;
  m["base"] = c.metric.base;
  m["dim"] = c.metric.dim;
  m["k0"] = chart.k0();
  m["conformal"] = c.metric.conformal;
  m["label"] = chart.label();
  return m;
}

ordered_json header(const std::string& command, const RunConfig& c, const geometry::MetricChart& chart) {
  ordered_json j;
  j["command"] = command;
  j["metric"] = metric_json(c, chart);
  j["grid"] = c.grid;
  j["strict"] = c.strict;
  return j;
}

void add_meta(ordered_json& j, const RunConfig& c) {
  if (c.no_meta) return;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  j["meta"] = {{"version", kVersion}, {"generated_utc", buf}, {"workers", c.workers}};
}

pseudoball::VolumeOptions volume_options(const RunConfig& c) {
  pseudoball::VolumeOptions v;
  v.solver.tol = std::min(c.tol, v.solver.tol);
  v.solver.workers = c.workers;
  return v;
}

ordered_json fit_json(const expansion::ExpansionFit& f) {
  ordered_json j;
  j["observable"] = f.observable;
  j["coefficient"] = f.coefficient;
  j["reference"] = f.reference;
  j["abs_error"] = f.error;
  j["rel_error"] = f.reference != 0.0 ? ordered_json(f.error / std::abs(f.reference)) : ordered_json();
  j["scalar_curvature"] = f.scalar_curvature;
  j["powers"] = f.powers;
  j["coefficients"] = f.coefficients;
  j["residual"] = f.residual;
  j["refit_coefficient"] = f.refit_coefficient;
  j["refit_change"] = f.refit_change;
  j[f.observable == "profile" ? "volumes" : "radii"] = f.samples;
  j["values"] = f.values;
  return j;
}

std::string fit_csv(const expansion::ExpansionFit& f) {
  std::ostringstream os;
  expansion::write_fit_csv(os, f);
  return os.str();
}

void write_files(const std::string& dir, const std::string& command, const CommandResult& r) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::InvalidArgument, "cannot create output directory '" + dir + "'");
  const auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + name + "' in '" + dir + "'");
    f << body;
  };
  if (!r.json.is_null()) write(command + ".json", r.json.dump(2) + "\n");
  for (const auto& [name, body] : r.files) write(name, body);
}

}  // namespace

CommandResult run_pseudoball(const RunConfig& c) {
  const auto chart = build_chart(c);
  const Vec p = base_point(c);
  const auto grid = sphere::make_grid(c.metric.dim, c.grid);
  const auto vo = volume_options(c);
  pseudoball::PseudoBallSolution s;
  if (c.volume) {
    s = pseudoball::beta(chart, p, *c.volume, grid, vo);
  } else {
    auto o = vo.solver;
    o.tol = c.tol;
    s = pseudoball::solve_pseudo_ball(chart, p, c.radius.value_or(0.1 * chart.length_scale()), grid, o);
  }
  CommandResult r;
  auto& j = r.json = header("pseudoball", c, chart);
  j["point"] = to_json(p);
  j["r"] = s.graph.r;
  if (c.volume) j["volume"] = *c.volume;
  ordered_json res;
  res["iterations"] = s.iterations;
  res["residual_Q"] = s.residual_Q;
  res["residual_A"] = s.residual_A;
  res["x_max_abs"] = s.graph.x.max_abs();
  res["x_mean"] = sphere::integrate(s.graph.x) / grid->measure();
  res["center_of_mass"] = to_json(s.center_of_mass);
  res["area"] = s.area;
  res["enclosed_volume"] = s.enclosed_volume;
  res["rho"] = s.rho;
  res["ray_steps"] = s.graph.ray_steps;
  j["result"] = res;
  add_meta(j, c);
  std::ostringstream os;
  sphere::write_csv(os, s.graph.x);
  r.files.emplace_back("pseudoball_x.csv", os.str());
  return r;
}

CommandResult run_expand(const RunConfig& c) {
  const auto chart = build_chart(c);
  const Vec p = base_point(c);
  const auto grid = sphere::make_grid(c.metric.dim, c.grid);
  expansion::FitOptions fo;
  fo.volume = volume_options(c);
  fo.workers = c.workers;
  const auto radii = c.radii.empty() ? expansion::default_radii(chart) : c.radii;
  const auto volumes = c.volumes.empty() ? expansion::default_volumes(chart) : c.volumes;
  const auto area = expansion::fit_area_coefficient(chart, p, radii, grid, fo);
  const auto volume = expansion::fit_volume_coefficient(chart, p, radii, grid, fo);
  const auto profile = expansion::fit_profile_coefficient(chart, p, volumes, grid, fo);
  CommandResult r;
  auto& j = r.json = header("expand", c, chart);
  j["point"] = to_json(p);
  j["scalar_curvature"] = area.scalar_curvature;
  j["area"] = fit_json(area);
  j["volume"] = fit_json(volume);
  j["profile"] = fit_json(profile);
  add_meta(j, c);
  r.files.emplace_back("expand_area.csv", fit_csv(area));
  r.files.emplace_back("expand_volume.csv", fit_csv(volume));
  r.files.emplace_back("expand_profile.csv", fit_csv(profile));
  return r;
}

CommandResult run_profile(const RunConfig& c) {
  if (!c.volume) throw Error(ErrorKind::InvalidArgument, "profile needs --volume");
  const auto chart = build_chart(c);
  const int n = c.metric.dim;
  const auto grid = sphere::make_grid(n, c.grid);
  expansion::ScanOptions so;
  so.points_per_axis = c.scan_points;
  so.refine_rounds = c.refine_rounds;
  so.fit.volume = volume_options(c);
  so.fit.workers = c.workers;
  const double v = *c.volume;
  const auto pt = expansion::profile_scan(chart, v, grid, so);
  const double cn = expansion::isoperimetric_constant(n);

  CommandResult r;
  auto& j = r.json = header("profile", c, chart);
  j["volume"] = v;
  j["minimizer"] = to_json(pt.minimizer);
  j["I"] = pt.value;
  j["c_n"] = cn;
  j["I_over_cn_power"] = pt.value / (cn * std::pow(v, (n - 1.0) / n));
  j["scalar_curvature_at_minimizer"] = geometry::scalar_curvature(chart, pt.minimizer);
  if (c.metric.conformal.empty()) {
    const double ref = expansion::constant_curvature_reference(chart.k0(), n, v);
    j["reference"] = ref;
    j["rel_error"] = std::abs(pt.value - ref) / ref;
  }
  j["grid_step"] = pt.grid_step;
  j["final_step"] = pt.final_step;
  j["grid_samples"] = pt.grid_samples;
  j["evaluations"] = pt.samples.size();
  add_meta(j, c);
  std::ostringstream os;
  expansion::write_scan_csv(os, pt);
  r.files.emplace_back("profile.csv", os.str());
  return r;
}

CommandResult run_partition(const RunConfig& c) {
  using namespace partition;
  PlanarDomain domain = PlanarDomain::disk(Point(0, 0), 1.0);
  if (c.domain == "square") {
    domain = PlanarDomain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  } else if (c.domain == "polygon") {
    std::vector<Point> v;
    for (const auto& q : c.polygon) v.emplace_back(q[0], q[1]);
    domain = PlanarDomain::polygon(v);
  }
  const auto a = average_over_grids(domain, c.mesh, c.samples, c.seed, c.workers);
  CommandResult r;
  auto& j = r.json;
  j["command"] = "partition";
  j["domain"] = c.domain;
  j["area"] = domain.area();
  j["mesh"] = c.mesh;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["estimate"] = a.estimate;
  j["reference"] = a.reference;
  j["ci"] = a.half_width;
  j["ci_level"] = 0.99;
  j["within_ci"] = std::abs(a.estimate - a.reference) <= a.half_width;
  if (c.offset) {
    const auto s = split_by_grid(domain, GridSample{c.mesh, Point((*c.offset)[0], (*c.offset)[1])});
    ordered_json sj;
    sj["offset"] = *c.offset;
    sj["components"] = s.components.size();
    sj["perimeter_sum"] = s.perimeter_sum;
    sj["boundary_perimeter"] = s.boundary_perimeter;
    sj["grid_length"] = s.grid_length;
    sj["defect"] = s.defect;
    j["split"] = sj;
  }
  add_meta(j, c);
  return r;
}

CommandResult run_selftest(const RunConfig& c, std::ostream& progress) {
  selftest::AcceptanceOptions o;
  o.workers = c.workers;
  CommandResult r;
  ordered_json list = ordered_json::array();
  int failed = 0;
  std::ostringstream text;
  selftest::run_acceptance(o, [&](const selftest::CriterionResult& cr) {
    const std::string line = selftest::format_line(cr);
    progress << line << "\n" << std::flush;
    text << line << "\n";
    if (!cr.passed) ++failed;
    list.push_back({{"id", cr.id}, {"name", cr.name}, {"passed", cr.passed},
                    {"detail", cr.detail}, {"seconds", cr.seconds}});
  });
  r.json["command"] = "selftest";
  r.json["criteria"] = list;
  r.json["failed"] = failed;
  add_meta(r.json, c);
  r.text = text.str();
  r.exit_code = failed == 0 ? 0 : 1;
  return r;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::StepCountExceeded:
    case ErrorKind::DegenerateInducedMetric:
    case ErrorKind::RhsNotInRange: return 3;
    default: return 2;
  }
}

std::string error_line(std::string_view kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j.dump();
}

std::string error_line(const std::exception& e) {
  nlohmann::ordered_json j;
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    j["error"] = {{"kind", to_string(pe->kind())}, {"message", pe->what()}, {"position", pe->position()}};
  } else if (const auto* le = dynamic_cast<const Error*>(&e)) {
    j["error"] = {{"kind", to_string(le->kind())}, {"message", le->what()}};
  } else {
    j["error"] = {{"kind", "InternalError"}, {"message", e.what()}};
  }
  return j.dump();
}

int run(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    CommandResult r;
    if (command == "pseudoball") r = run_pseudoball(config);
    else if (command == "expand") r = run_expand(config);
    else if (command == "profile") r = run_profile(config);
    else if (command == "partition") r = run_partition(config);
    else if (command == "selftest") r = run_selftest(config, out);
    else throw Error(ErrorKind::InvalidArgument, "unknown command '" + command + "'");
    if (command != "selftest") out << r.json.dump(2) << "\n";
    if (!config.out.empty()) write_files(config.out, command, r);
    return r.exit_code;
  } catch (const Error& e) {
    err << error_line(e) << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << error_line(e) << "\n";
    return 1;
  }
}

}  // namespace isoprofile::cli
