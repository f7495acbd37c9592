#include "isoprofile/partition/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include "isoprofile/core/error.hpp"
#include "isoprofile/core/parallel.hpp"
#include "isoprofile/core/types.hpp"

namespace isoprofile::partition {

namespace {

using Poly = std::vector<Point>;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Poly& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * s;
}

double perimeter_of(const Poly& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[(i + 1) % p.size()] - p[i]).norm();
  return s;
}

bool segments_meet(const Point& a, const Point& b, const Point& c, const Point& d) {
  const auto orient = [](const Point& p, const Point& q, const Point& r) {
    const double v = cross(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  const auto within = [](const Point& p, const Point& q, const Point& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && within(a, b, c)) || (o2 == 0 && within(a, b, d)) ||
         (o3 == 0 && within(c, d, a)) || (o4 == 0 && within(c, d, b));
}

bool on_segment(const Point& a, const Point& b, const Point& p, double eps) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (a + t * ab - p).norm() <= eps;
}

bool strictly_inside(const Poly& poly, const Point& p, double eps) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if (on_segment(a, b, p, eps)) return false;
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

// Integer range of k with offset + k mesh in [lo, hi].
std::pair<long, long> line_range(double lo, double hi, double offset, double mesh) {
  return {static_cast<long>(std::ceil((lo - offset) / mesh)),
          static_cast<long>(std::floor((hi - offset) / mesh))};
}

// Length of the open polygon on the line {p[axis] = c}.
double polygon_line_length(const Poly& poly, int axis, double c, double eps) {
  const int other = 1 - axis;
  std::vector<double> breaks;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    const double da = a[axis] - c, db = b[axis] - c;
    if (da == 0.0) breaks.push_back(a[other]);
    if (da * db < 0.0) breaks.push_back(a[other] + (b[other] - a[other]) * da / (da - db));
  }
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (breaks[k + 1] <= breaks[k]) continue;
    Point mid;
    mid[axis] = c;
    mid[other] = 0.5 * (breaks[k] + breaks[k + 1]);
    if (strictly_inside(poly, mid, eps)) total += breaks[k + 1] - breaks[k];
  }
  return total;
}

double scale_eps(const PlanarDomain& d) { return 1e-12 * std::max(1.0, (d.hi() - d.lo()).norm()); }

// Keeps the part of a simple counterclockwise polygon where
// sign (p[axis] - c) > 0. The pieces are reassembled by pairing crossings
// in their order along the line.
std::vector<Poly> clip_half(const Poly& poly, int axis, double c, double sign) {
  const std::size_t m = poly.size();
  std::vector<double> d(m);
  bool any_in = false, any_out = false;
  for (std::size_t i = 0; i < m; ++i) {
    d[i] = sign * (poly[i][axis] - c);
    if (d[i] == 0.0) throw Error(ErrorKind::DegeneratePosition, "polygon vertex on a grid line");
    (d[i] > 0.0 ? any_in : any_out) = true;
  }
  if (!any_out) return {poly};
  if (!any_in) return {};

  struct Crossing {
    double t;
    bool start;
    std::size_t chain;
  };
  std::vector<Poly> chains;
  std::vector<Crossing> crossings;
  std::size_t i0 = 0;
  while (d[i0] > 0.0) ++i0;
  const int other = 1 - axis;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = (i0 + k) % m, j = (i + 1) % m;
    if ((d[i] > 0.0) == (d[j] > 0.0)) {
      if (d[j] > 0.0) chains.back().push_back(poly[j]);
      continue;
    }
    Point x = poly[i] + (poly[j] - poly[i]) * (d[i] / (d[i] - d[j]));
    x[axis] = c;
    if (d[j] > 0.0) {
      chains.push_back({x, poly[j]});
      crossings.push_back({x[other], true, chains.size() - 1});
    } else {
      chains.back().push_back(x);
      crossings.push_back({x[other], false, chains.size() - 1});
    }
  }
  std::vector<std::size_t> order(crossings.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return crossings[a].t < crossings[b].t; });
  // next_chain[c]: chain entered after leaving chain c along the line.
  std::vector<std::size_t> next_chain(chains.size());
  for (std::size_t k = 0; k + 1 < order.size(); k += 2) {
    const Crossing& a = crossings[order[k]];
    const Crossing& b = crossings[order[k + 1]];
    if (a.start == b.start) throw std::logic_error("clip_half: unpaired crossings");
    const Crossing& end = a.start ? b : a;
    const Crossing& begin = a.start ? a : b;
    next_chain[end.chain] = begin.chain;
  }
  std::vector<Poly> out;
  std::vector<bool> used(chains.size(), false);
  for (std::size_t c0 = 0; c0 < chains.size(); ++c0) {
    if (used[c0]) continue;
    Poly piece;
    for (std::size_t ch = c0; !used[ch]; ch = next_chain[ch]) {
      used[ch] = true;
      piece.insert(piece.end(), chains[ch].begin(), chains[ch].end());
    }
    out.push_back(std::move(piece));
  }
  return out;
}

std::vector<Poly> clip_all(const std::vector<Poly>& in, int axis, double c, double sign) {
  std::vector<Poly> out;
  for (const Poly& p : in)
    for (Poly& q : clip_half(p, axis, c, sign)) out.push_back(std::move(q));
  return out;
}

}  // namespace

PlanarDomain PlanarDomain::polygon(std::vector<Point> vertices) {
  if (vertices.size() < 3) throw Error(ErrorKind::InvalidArgument, "polygon needs 3 vertices");
  const double a = signed_area(vertices);
  if (!(std::abs(a) > 0.0)) throw Error(ErrorKind::InvalidArgument, "polygon has zero area");
  if (a < 0.0) std::reverse(vertices.begin(), vertices.end());
  const std::size_t m = vertices.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (j == i + 1 || (i == 0 && j == m - 1)) continue;
      if (segments_meet(vertices[i], vertices[(i + 1) % m], vertices[j], vertices[(j + 1) % m]))
        throw Error(ErrorKind::InvalidArgument, "polygon boundary self-intersects");
    }
  PlanarDomain d;
  d.vertices_ = std::move(vertices);
  return d;
}

PlanarDomain PlanarDomain::disk(Point center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "disk radius must be positive");
  PlanarDomain d;
  d.disk_ = true;
  d.center_ = center;
  d.radius_ = radius;
  d.vertices_.resize(kDiskPolygonVertices);
  for (int k = 0; k < kDiskPolygonVertices; ++k) {
    const double t = 2.0 * kPi * k / kDiskPolygonVertices;
    d.vertices_[static_cast<std::size_t>(k)] = center + radius * Point(std::cos(t), std::sin(t));
  }
  return d;
}

double PlanarDomain::area() const {
  return disk_ ? kPi * radius_ * radius_ : signed_area(vertices_);
}

double PlanarDomain::perimeter() const {
  return disk_ ? 2.0 * kPi * radius_ : perimeter_of(vertices_);
}

Point PlanarDomain::lo() const {
  if (disk_) return center_ - Point::Constant(radius_);
  Point p = vertices_[0];
  for (const Point& v : vertices_) p = p.cwiseMin(v);
  return p;
}

Point PlanarDomain::hi() const {
  if (disk_) return center_ + Point::Constant(radius_);
  Point p = vertices_[0];
  for (const Point& v : vertices_) p = p.cwiseMax(v);
  return p;
}

double grid_intersection_measure(const PlanarDomain& domain, const GridSample& grid) {
  if (!(grid.mesh > 0.0)) throw Error(ErrorKind::InvalidArgument, "mesh must be positive");
  const Point lo = domain.lo(), hi = domain.hi();
  const double eps = scale_eps(domain);
  double total = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    const auto [k0, k1] = line_range(lo[axis], hi[axis], grid.offset[axis], grid.mesh);
    for (long k = k0; k <= k1; ++k) {
      const double c = grid.offset[axis] + static_cast<double>(k) * grid.mesh;
      if (domain.is_disk()) {
        const double h = c - domain.center()[axis];
        const double q = domain.radius() * domain.radius() - h * h;
        if (q > 0.0) total += 2.0 * std::sqrt(q);
      } else {
        total += polygon_line_length(domain.vertices(), axis, c, eps);
      }
    }
  }
  return total;
}

GridAverage average_over_grids(const PlanarDomain& domain, double mesh, std::size_t samples,
                               std::uint64_t seed, int workers) {
  if (samples < 100) throw Error(ErrorKind::InvalidArgument, "need at least 100 samples");
  if (!(mesh > 0.0)) throw Error(ErrorKind::InvalidArgument, "mesh must be positive");
  std::vector<double> values(samples);
  parallel_for(samples, workers, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(0.0, mesh);
    GridSample g;
    g.mesh = mesh;
    g.offset.x() = u(rng);
    g.offset.y() = u(rng);
    values[i] = grid_intersection_measure(domain, g);
  });
  GridAverage out;
  out.samples = samples;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.estimate = sum / static_cast<double>(samples);
  double ss = 0.0;
  for (double v : values) ss += (v - out.estimate) * (v - out.estimate);
  out.std_dev = std::sqrt(ss / static_cast<double>(samples - 1));
  out.half_width = 2.5758293035489004 * out.std_dev / std::sqrt(static_cast<double>(samples));
  out.reference = 2.0 / mesh * domain.area();
  return out;
}

Split split_by_grid(const PlanarDomain& domain, const GridSample& grid) {
  if (!(grid.mesh > 0.0)) throw Error(ErrorKind::InvalidArgument, "mesh must be positive");
  const Poly& poly = domain.vertices();
  const double r = grid.mesh;
  for (const Point& v : poly)
    for (int axis = 0; axis < 2; ++axis) {
      const double q = (v[axis] - grid.offset[axis]) / r;
      if (std::abs(q - std::round(q)) * r <= 1e-12 * std::max(1.0, std::abs(v[axis]))) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "vertex (%.17g, %.17g) lies on a grid line", v.x(), v.y());
        throw Error(ErrorKind::DegeneratePosition, buf);
      }
    }

  Point lo = poly[0], hi = poly[0];
  for (const Point& v : poly) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  // Cells [offset + k r, offset + (k+1) r] meeting the bounding box.
  const long x0 = static_cast<long>(std::floor((lo.x() - grid.offset.x()) / r));
  const long x1 = static_cast<long>(std::floor((hi.x() - grid.offset.x()) / r));
  const long y0 = static_cast<long>(std::floor((lo.y() - grid.offset.y()) / r));
  const long y1 = static_cast<long>(std::floor((hi.y() - grid.offset.y()) / r));

  Split out;
  for (long i = x0; i <= x1; ++i) {
    const double a = grid.offset.x() + static_cast<double>(i) * r;
    std::vector<Poly> strip = clip_all({poly}, 0, a, 1.0);
    strip = clip_all(strip, 0, a + r, -1.0);
    for (long j = y0; j <= y1 && !strip.empty(); ++j) {
      const double b = grid.offset.y() + static_cast<double>(j) * r;
      std::vector<Poly> cell = clip_all(strip, 1, b, 1.0);
      cell = clip_all(cell, 1, b + r, -1.0);
      for (Poly& p : cell) {
        Component c;
        c.cell_x = i;
        c.cell_y = j;
        c.area = signed_area(p);
        c.perimeter = perimeter_of(p);
        c.vertices = std::move(p);
        out.perimeter_sum += c.perimeter;
        out.components.push_back(std::move(c));
      }
    }
  }
  out.boundary_perimeter = perimeter_of(poly);
  const PlanarDomain as_polygon = domain.is_disk() ? PlanarDomain::polygon(poly) : domain;
  out.grid_length = grid_intersection_measure(as_polygon, grid);
  out.defect = out.perimeter_sum - out.boundary_perimeter - 2.0 * out.grid_length;
  return out;
}

FractionBound largest_fraction_bound(const std::vector<double>& fractions, int n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 2");
  if (fractions.empty()) throw Error(ErrorKind::NotNormalized, "no fractions given");
  double sum = 0.0, s = 0.0, mx = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw Error(ErrorKind::InvalidArgument, "fractions must be nonnegative");
    sum += f;
    s += std::pow(f, (n - 1.0) / n);
    mx = std::max(mx, f);
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "fractions sum to %.17g", sum);
    throw Error(ErrorKind::NotNormalized, buf);
  }
  FractionBound out;
  out.max_fraction = mx;
  out.bound = std::pow(s, -static_cast<double>(n));
  out.holds = out.max_fraction >= out.bound * (1.0 - 1e-14);
  return out;
}

}  // namespace isoprofile::partition
