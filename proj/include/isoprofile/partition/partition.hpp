#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace isoprofile::partition {

using Point = Eigen::Vector2d;

/// A bounded open set of the plane: a simple polygon or a disk.
class PlanarDomain {
 public:
  /// Vertices in either orientation; stored counterclockwise. Throws
  /// InvalidArgument for fewer than 3 vertices, zero area or a
  /// self-intersecting boundary.
  static PlanarDomain polygon(std::vector<Point> vertices);
  static PlanarDomain disk(Point center, double radius);

  bool is_disk() const { return disk_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  /// Polygon vertices; a disk is returned as a regular 4096-gon.
  const std::vector<Point>& vertices() const { return vertices_; }
  double area() const;
  double perimeter() const;
  /// Axis-aligned bounding box of the exact domain.
  Point lo() const;
  Point hi() const;

 private:
  PlanarDomain() = default;
  bool disk_ = false;
  Point center_ = Point::Zero();
  double radius_ = 0.0;
  std::vector<Point> vertices_;
};

inline constexpr int kDiskPolygonVertices = 4096;

/// The lines {x_i = offset_i + k mesh : k integer}, i = 1, 2.
struct GridSample {
  double mesh = 1.0;
  Point offset = Point::Zero();
};

/// Total length of D intersected with every grid line. Points of the
/// boundary of D carry no length.
double grid_intersection_measure(const PlanarDomain& domain, const GridSample& grid);

struct GridAverage {
  double estimate = 0.0;
  double half_width = 0.0;  // 99% normal confidence half-width
  double reference = 0.0;   // (n / mesh) area(D)
  double std_dev = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo mean of grid_intersection_measure over uniform offsets in
/// [0, mesh)^2. Sample i draws its offset from mt19937_64 seeded with
/// seed_seq{seed, i}, so results do not depend on the worker count.
GridAverage average_over_grids(const PlanarDomain& domain, double mesh, std::size_t samples,
                               std::uint64_t seed, int workers = 1);

struct Component {
  std::vector<Point> vertices;  // counterclockwise
  long cell_x = 0;
  long cell_y = 0;
  double area = 0.0;
  double perimeter = 0.0;
};

struct Split {
  std::vector<Component> components;
  double perimeter_sum = 0.0;
  double boundary_perimeter = 0.0;
  /// grid_intersection_measure of the split polygon.
  double grid_length = 0.0;
  /// perimeter_sum - boundary_perimeter - 2 grid_length.
  double defect = 0.0;
};

/// Connected components of D minus the grid lines, by clipping the polygon
/// (disks use their 4096-gon) against every grid cell. Throws
/// DegeneratePosition when a vertex lies on a grid line.
Split split_by_grid(const PlanarDomain& domain, const GridSample& grid);

struct FractionBound {
  double max_fraction = 0.0;
  double bound = 0.0;  // (sum f_k^{(n-1)/n})^{-n}
  bool holds = false;
};

/// Checks max f_k >= (sum_k f_k^{(n-1)/n})^{-n} for fractions summing to 1.
/// Throws NotNormalized if |sum - 1| > 1e-12, InvalidArgument for negative
/// entries or n < 2.
FractionBound largest_fraction_bound(const std::vector<double>& fractions, int n);

}  // namespace isoprofile::partition
