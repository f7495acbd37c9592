#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "isoprofile/cli/commands.hpp"
#include "isoprofile/cli/expression.hpp"
#include "isoprofile/core/error.hpp"
#include "test_support.hpp"

using namespace isoprofile;
using namespace isoprofile::cli;
using namespace test_support;
using nlohmann::json;

namespace {

std::size_t error_position(std::string_view text, int dim, ErrorKind expect) {
  try {
    parse_expression(text, dim);
  } catch (const ParseError& e) {
    CHECK(e.kind() == expect);
    return e.position();
  }
  FAIL("expected a parse error for " << text);
  return 0;
}

// Random expression text over x1, x2 built from the grammar's productions.
std::string random_text(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  switch (pick(rng)) {
    case 0: return "x1";
    case 1: return "x2";
    case 2: {
      std::ostringstream os;
      os.precision(17);
      os << u(rng);
      return os.str();
    }
    case 3: return "-" + random_text(rng, depth - 1);
    case 4: return random_text(rng, depth - 1) + " + " + random_text(rng, depth - 1);
    case 5: return random_text(rng, depth - 1) + "-" + random_text(rng, depth - 1);
    case 6: return random_text(rng, depth - 1) + "*" + random_text(rng, depth - 1);
    case 7: return random_text(rng, depth - 1) + "/(2 + " + random_text(rng, depth - 1) + "^2)";
    case 8: return "(" + random_text(rng, depth - 1) + ")^2";
    case 9: return "sin(" + random_text(rng, depth - 1) + ")";
    default: return "exp(-(" + random_text(rng, depth - 1) + ")^2)";
  }
}

RunConfig quiet(RunConfig c) {
  c.no_meta = true;
  c.workers = 1;
  return c;
}

json run_json(const std::string& command, const RunConfig& c, int expect_exit = 0) {
  std::ostringstream out, err;
  const int code = run(command, c, out, err);
  CHECK(code == expect_exit);
  CHECK(err.str().empty());
  return json::parse(out.str());
}

}  // namespace

TEST_CASE("expression examples") {
  CHECK(parse_expression("x1+2*x2", 2).evaluate(vec2(1, 3)) == 7.0);
  Vec zero(1);
  zero << 0.0;
  CHECK(parse_expression("exp(-(x1^2))", 1).evaluate(zero) == 1.0);
  CHECK(parse_expression("0.1*exp(-((x1-0.3)^2+x2^2)/0.04)", 2).evaluate(vec2(0.3, 0)) ==
        doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("expression precedence and associativity") {
  const Vec x = vec2(2, 3);
  const auto ev = [&](const char* s) { return parse_expression(s, 2).evaluate(x); };
  CHECK(ev("2^3^2") == 512.0);
  CHECK(ev("-x1^2") == -4.0);
  CHECK(ev("(-x1)^2") == 4.0);
  CHECK(ev("2^-1") == 0.5);
  CHECK(ev("x2*-x1") == -6.0);
  CHECK(ev("8/2/2") == 2.0);
  CHECK(ev("1-2-3") == -4.0);
  CHECK(ev("1+2*3^2") == 19.0);
  CHECK(ev("- -x1") == 2.0);
  CHECK(ev(" sqrt( x1*8 ) ") == 4.0);
  CHECK(ev("cos(0)+sin(0)") == 1.0);
  CHECK(ev("1.5e1+.5") == 15.5);
  CHECK(ev("2E-1") == doctest::Approx(0.2));
}

TEST_CASE("expression errors carry byte offsets") {
  CHECK(error_position("1+", 2, ErrorKind::SyntaxError) == 2);
  CHECK(error_position("1)", 2, ErrorKind::SyntaxError) == 1);
  CHECK(error_position("(1", 2, ErrorKind::SyntaxError) == 2);
  CHECK(error_position("exp 1", 2, ErrorKind::SyntaxError) == 4);
  CHECK(error_position("2*#", 2, ErrorKind::SyntaxError) == 2);
  CHECK(error_position("1.2.3", 2, ErrorKind::SyntaxError) == 0);
  CHECK(error_position("x1 + x3", 2, ErrorKind::UnknownIdentifier) == 5);
  CHECK(error_position("log(x1)", 2, ErrorKind::UnknownIdentifier) == 0);
  CHECK(error_position("x0", 3, ErrorKind::UnknownIdentifier) == 0);
  CHECK(error_position("", 3, ErrorKind::SyntaxError) == 0);
}

TEST_CASE("expression printer round-trips") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const std::string text = random_text(rng, 4);
    const auto e = parse_expression(text, 2);
    const std::string printed = e.to_string();
    const auto back = parse_expression(printed, 2);
    CHECK_MESSAGE(structurally_equal(e.root(), back.root()), text, " -> ", printed);
    CHECK(back.to_string() == printed);
    const Vec x = vec2(u(rng), u(rng));
    const double a = e.evaluate(x), b = back.evaluate(x);
    CHECK((a == b || (std::isnan(a) && std::isnan(b))));
  }
  CHECK(parse_expression("(x1 - 0.3)^2", 2).to_string() == "(x1 - 0.3)^2");
  CHECK(parse_expression("x1-(x2-1)", 2).to_string() == "x1 - (x2 - 1)");
  CHECK(parse_expression("(x1*x2)*3", 2).to_string() == "x1*x2*3");
  CHECK(parse_expression("(2^3)^2", 2).to_string() == "(2^3)^2");
  CHECK(parse_expression("-(x1^2)", 2).to_string() == "-x1^2");
}

TEST_CASE("expression jets match finite differences") {
  const auto e = parse_expression("0.3*exp(-((x1-0.2)^2 + x2*x3)/0.5) + sin(x1)*sqrt(2 + x3)", 3);
  const Vec x = vec3(0.1, -0.4, 0.7);
  const auto jet = e.evaluate_jet(x);
  CHECK(jet.value == e.evaluate(x));
  const double h = 1e-4;
  for (int i = 0; i < 3; ++i) {
    const Vec d = h * Vec::Unit(3, i);
    CHECK(jet.grad[i] == doctest::Approx((e.evaluate(x + d) - e.evaluate(x - d)) / (2 * h)).epsilon(1e-7));
    for (int k = 0; k < 3; ++k) {
      const Vec dk = h * Vec::Unit(3, k);
      const double fd = (e.evaluate(x + d + dk) - e.evaluate(x + d - dk) - e.evaluate(x - d + dk) +
                         e.evaluate(x - d - dk)) /
                        (4 * h * h);
      CHECK(jet.hess[i][k] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("conformal chart from an expression matches the jet-built bump") {
  const auto e = parse_expression("0.1*exp(-((x1 - 0.5)^2 + (x2 - 0.5)^2)/0.04)", 2);
  const auto parsed = geometry::MetricChart::conformal(geometry::MetricChart::flat_torus(2),
                                                       to_log_factor(e), e.to_string());
  const auto direct = gaussian_bump(geometry::MetricChart::flat_torus(2), vec2(0.5, 0.5), 0.1, 0.04);
  for (const Vec& p : {vec2(0.5, 0.5), vec2(0.4, 0.62)})
    CHECK(geometry::scalar_curvature(parsed, p) ==
          doctest::Approx(geometry::scalar_curvature(direct, p)).epsilon(1e-12));
}

TEST_CASE("config from json") {
  const auto c = config_from_json(json::parse(R"({
    "metric": {"base": "sphere", "k0": 2.0, "dim": 3, "conformal": "0.1*x1"},
    "point": [0.1, 0.2, 0.0], "radii": [0.2, 0.1, 0.05, 0.02], "grid": 12, "tol": 1e-8,
    "seed": 9, "no_meta": true, "domain": "polygon", "polygon": [[0,0],[1,0],[0,1]],
    "offset": [0.1, 0.2]
  })"));
  CHECK(c.metric.base == "sphere");
  CHECK(*c.metric.k0 == 2.0);
  CHECK(c.metric.dim == 3);
  CHECK(c.radii.size() == 4);
  CHECK(c.grid == 12);
  CHECK(c.seed == 9);
  CHECK(c.polygon.size() == 3);
  CHECK((*c.offset)[1] == 0.2);
  validate(c);
  const auto chart = build_chart(c);
  CHECK(chart.dim() == 3);
  CHECK(chart.is_conformal_perturbation());
  CHECK(base_point(c) == vec3(0.1, 0.2, 0.0));

  CHECK_THROWS_AS(config_from_json(json::parse(R"({"radiuss": 1})")), Error);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"metric": {"bse": "sphere"}})")), Error);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"grid": "large"})")), Error);
}

TEST_CASE("config validation") {
  RunConfig c;
  validate(c);
  CHECK(base_point(c) == vec2(0, 0));
  c.metric.base = "torus";
  CHECK(base_point(c) == vec2(0.5, 0.5));
  const auto bad = [](auto edit) {
    RunConfig c;
    edit(c);
    CHECK_THROWS_AS(validate(c), Error);
  };
  bad([](RunConfig& c) { c.radii = {0.1, 0.2, 0.05, 0.01}; });
  bad([](RunConfig& c) { c.volumes = {0.1, 0.1}; });
  bad([](RunConfig& c) { c.tol = 0.0; });
  bad([](RunConfig& c) { c.metric.dim = 4; });
  bad([](RunConfig& c) { c.metric.base = "cylinder"; });
  bad([](RunConfig& c) { c.metric.base = "sphere"; c.metric.k0 = -1.0; });
  bad([](RunConfig& c) { c.metric.conformal = "x3"; });
  bad([](RunConfig& c) { c.point = {1.0}; });
  bad([](RunConfig& c) { c.samples = 10; });
}

TEST_CASE("cli profile example on the unit sphere") {
  RunConfig c;
  c.metric.base = "sphere";
  c.metric.k0 = 1.0;
  c.volume = 0.5;
  c.scan_points = 2;
  c.refine_rounds = 1;
  const auto j = run_json("profile", quiet(c));
  CHECK(j["I"].get<double>() == doctest::Approx(std::sqrt(4 * kPi * 0.5 - 0.25)).epsilon(1e-4));
  CHECK(j["rel_error"].get<double>() < 1e-4);
}

TEST_CASE("cli expand example in flat space") {
  RunConfig c;
  c.metric.dim = 3;
  const auto j = run_json("expand", quiet(c));
  for (const char* k : {"area", "volume", "profile"})
    CHECK(std::abs(j[k]["coefficient"].get<double>()) < 1e-6);
}

TEST_CASE("cli partition example and determinism") {
  RunConfig c;
  c.mesh = 5;
  c.samples = 100000;
  c.seed = 7;
  std::ostringstream a, b, err;
  CHECK(run("partition", quiet(c), a, err) == 0);
  auto c2 = quiet(c);
  c2.workers = 2;
  CHECK(run("partition", c2, b, err) == 0);
  CHECK(a.str() == b.str());
  const auto j = json::parse(a.str());
  CHECK(std::abs(j["estimate"].get<double>() - 1.25664) <= j["ci"].get<double>());
  for (const char* k : {"domain", "mesh", "samples", "estimate", "reference", "ci"}) CHECK(j.contains(k));
}

TEST_CASE("cli writes csv and json files") {
  const auto dir = std::filesystem::temp_directory_path() / "isoprofile_cli_test";
  std::filesystem::remove_all(dir);
  RunConfig c;
  c.radius = 0.2;
  c.out = dir.string();
  std::ostringstream out, err;
  CHECK(run("pseudoball", c, out, err) == 0);
  CHECK(json::parse(out.str()).contains("meta"));
  std::ifstream csv(dir / "pseudoball_x.csv");
  std::string head;
  std::getline(csv, head);
  CHECK(head == "theta1,theta2,value\r");
  CHECK(std::filesystem::exists(dir / "pseudoball.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli error paths") {
  const auto fails = [](const std::string& command, RunConfig c, int code, const std::string& kind) {
    std::ostringstream out, err;
    CHECK(run(command, quiet(c), out, err) == code);
    const std::string line = err.str();
    CHECK(line.find('\n') == line.size() - 1);
    CHECK(json::parse(line)["error"]["kind"] == kind);
  };
  RunConfig syntax;
  syntax.metric.conformal = "0.1*(x1";
  fails("pseudoball", syntax, 2, "SyntaxError");
  RunConfig big;
  big.radius = 100.0;
  fails("pseudoball", big, 2, "RadiusTooLarge");
  RunConfig tight;
  tight.tol = 1e-300;
  tight.metric.conformal = "0.1*x1^2";
  tight.radius = 0.1;
  fails("pseudoball", tight, 3, "NoConvergence");
  RunConfig flat;
  flat.volume = 0.01;
  fails("profile", flat, 2, "InvalidArgument");
  RunConfig degenerate;
  degenerate.domain = "square";
  degenerate.mesh = 0.5;
  degenerate.offset = std::array<double, 2>{0.0, 0.0};
  fails("partition", degenerate, 2, "DegeneratePosition");
  fails("unknown", RunConfig{}, 2, "InvalidArgument");
  CHECK(exit_code_for(ErrorKind::NoConvergence) == 3);
  CHECK(exit_code_for(ErrorKind::VolumeOutOfRange) == 2);
}
