#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "isoprofile/core/error.hpp"
#include "isoprofile/core/types.hpp"
#include "isoprofile/partition/partition.hpp"

using namespace isoprofile;
using namespace isoprofile::partition;

namespace {

PlanarDomain unit_square() {
  return PlanarDomain::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

GridSample grid(double mesh, double ox, double oy) { return {mesh, Point(ox, oy)}; }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

// Star-shaped polygon with sorted random angles; usually non-convex.
PlanarDomain random_star(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = 5 + static_cast<int>(u(rng) * 20);
  std::vector<double> angles(static_cast<std::size_t>(k));
  for (double& a : angles) a = 2 * kPi * u(rng);
  std::sort(angles.begin(), angles.end());
  const Point c(u(rng), u(rng));
  std::vector<Point> v;
  for (double a : angles) v.push_back(c + (0.3 + 0.7 * u(rng)) * Point(std::cos(a), std::sin(a)));
  return PlanarDomain::polygon(v);
}

}  // namespace

TEST_CASE("planar domain basics") {
  const auto sq = unit_square();
  CHECK(sq.area() == 1.0);
  CHECK(sq.perimeter() == 4.0);
  // Clockwise input is stored counterclockwise.
  const auto cw = PlanarDomain::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(cw.area() == 1.0);
  const auto disk = PlanarDomain::disk(Point(1, 2), 0.5);
  CHECK(disk.area() == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(disk.vertices().size() == kDiskPolygonVertices);
  CHECK(disk.lo() == Point(0.5, 1.5));

  CHECK_THROWS_AS(PlanarDomain::polygon({{0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(PlanarDomain::polygon({{0, 0}, {1, 1}, {2, 2}}), Error);
  CHECK_THROWS_AS(PlanarDomain::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);  // bow tie
  CHECK_THROWS_AS(PlanarDomain::disk(Point(0, 0), 0.0), Error);
}

TEST_CASE("grid intersection measure examples") {
  CHECK(grid_intersection_measure(unit_square(), grid(0.5, 0, 0)) == 2.0);
  const auto disk = PlanarDomain::disk(Point(0, 0), 1.0);
  CHECK(grid_intersection_measure(disk, grid(4, 0, 0)) == 4.0);
  CHECK(grid_intersection_measure(disk, grid(100, 3, 3)) == 0.0);
  CHECK(grid_intersection_measure(unit_square(), grid(100, 3, 3)) == 0.0);
  // A non-convex line section: the U shape meets y = 2 in its two arms.
  const auto u = PlanarDomain::polygon(
      {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}});
  CHECK(grid_intersection_measure(u, grid(10, -5.3, 2)) == 2.0);
  // Line through the inner edge y = 1 carries only the bottom bar.
  CHECK(grid_intersection_measure(u, grid(10, -5.3, 1)) == doctest::Approx(2.0));
}

TEST_CASE("disk polygonization converges to exact chords") {
  const auto disk = PlanarDomain::disk(Point(0.1, -0.2), 1.0);
  const auto poly = PlanarDomain::polygon(disk.vertices());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.37);
  for (int k = 0; k < 20; ++k) {
    const auto g = grid(0.37, u(rng), u(rng));
    CHECK(grid_intersection_measure(poly, g) ==
          doctest::Approx(grid_intersection_measure(disk, g)).epsilon(1e-5));
  }
}

TEST_CASE("grid averages match the averaging identity") {
  const auto disk = PlanarDomain::disk(Point(0, 0), 1.0);
  const auto a = average_over_grids(disk, 5.0, 100000, 7);
  CHECK(a.reference == doctest::Approx(2 * kPi / 5).epsilon(1e-15));
  CHECK(std::abs(a.estimate - a.reference) <= a.half_width);
  const auto b = average_over_grids(unit_square(), 2.0, 100000, 7);
  CHECK(b.reference == 1.0);
  CHECK(std::abs(b.estimate - b.reference) <= b.half_width);
  const auto far = average_over_grids(unit_square(), 1e4, 1000, 1);
  CHECK(far.estimate < 1e-2);
  CHECK(far.reference == 2e-4);
}

TEST_CASE("grid averages are deterministic") {
  const auto disk = PlanarDomain::disk(Point(0.3, 0), 1.0);
  const auto a = average_over_grids(disk, 2.0, 5000, 42, 1);
  const auto b = average_over_grids(disk, 2.0, 5000, 42, 3);
  const auto c = average_over_grids(disk, 2.0, 5000, 43, 1);
  CHECK(a.estimate == b.estimate);
  CHECK(a.half_width == b.half_width);
  CHECK(a.estimate != c.estimate);
  CHECK_THROWS_AS(average_over_grids(disk, 2.0, 99, 1), Error);
}

TEST_CASE("split by grid examples") {
  const auto s = split_by_grid(unit_square(), grid(0.5, 0.25, 0.25));
  CHECK(s.components.size() == 9);
  CHECK(s.grid_length == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(std::abs(s.perimeter_sum - 4.0 - 2.0 * s.grid_length) < 1e-12);
  double area = 0.0;
  for (const auto& c : s.components) area += c.area;
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));

  const auto inside = split_by_grid(unit_square(), grid(10, 3, 3));
  CHECK(inside.components.size() == 1);
  CHECK(inside.grid_length == 0.0);
  CHECK(inside.defect == 0.0);

  CHECK(kind_of([] { split_by_grid(unit_square(), grid(0.5, 0, 0)); }) ==
        ErrorKind::DegeneratePosition);
}

TEST_CASE("split of a non-convex polygon finds every component") {
  const auto u = PlanarDomain::polygon(
      {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}});
  const auto s = split_by_grid(u, grid(10, -5.3, 2.1));
  CHECK(s.components.size() == 3);
  CHECK(s.grid_length == doctest::Approx(2.0));
  CHECK(std::abs(s.defect) < 1e-12);
  std::vector<double> areas;
  for (const auto& c : s.components) areas.push_back(c.area);
  std::sort(areas.begin(), areas.end());
  CHECK(areas[0] == doctest::Approx(0.9));
  CHECK(areas[1] == doctest::Approx(0.9));
  CHECK(areas[2] == doctest::Approx(5.2));
}

TEST_CASE("splitting identity on random polygons") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const auto d = random_star(rng);
    const double mesh = 0.15 + 0.35 * u(rng);
    const auto s = split_by_grid(d, grid(mesh, mesh * u(rng), mesh * u(rng)));
    CHECK(std::abs(s.defect) < 1e-9);
    double area = 0.0;
    for (const auto& c : s.components) {
      CHECK(c.area > 0.0);
      area += c.area;
    }
    CHECK(area == doctest::Approx(d.area()).epsilon(1e-12));
  }
}

TEST_CASE("splitting identity on a polygonized disk") {
  const auto s = split_by_grid(PlanarDomain::disk(Point(0.05, 0.02), 1.0), grid(0.3, 0.1, 0.2));
  CHECK(std::abs(s.defect) < 1e-9);
  CHECK(s.components.size() > 20);
}

TEST_CASE("largest fraction bound examples") {
  const auto one = largest_fraction_bound({1.0}, 3);
  CHECK(one.max_fraction == 1.0);
  CHECK(one.bound == 1.0);
  CHECK(one.holds);
  const auto half = largest_fraction_bound({0.5, 0.5}, 2);
  CHECK(half.bound == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half.max_fraction == 0.5);
  CHECK(half.holds);
  CHECK(kind_of([] { largest_fraction_bound({0.5, 0.4}, 2); }) == ErrorKind::NotNormalized);
  CHECK(kind_of([] { largest_fraction_bound({1.5, -0.5}, 2); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("largest fraction bound holds on random partitions") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const int parts = 1 + static_cast<int>(u(rng) * 20);
    std::vector<double> f(static_cast<std::size_t>(parts));
    double sum = 0.0;
    for (double& x : f) sum += (x = -std::log(1.0 - u(rng)));
    for (double& x : f) x /= sum;
    for (int n : {2, 3})
      if (!largest_fraction_bound(f, n).holds) ++violations;
  }
  CHECK(violations == 0);
}
