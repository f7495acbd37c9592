#pragma once

#include <numbers>
#include <random>

#include "isoprofile/geometry/metric_chart.hpp"

namespace test_support {

using isoprofile::Vec;
using isoprofile::geometry::Jet;
using isoprofile::geometry::MetricChart;

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

/// amp * exp(-|x - centre|^2 / width2) as a conformal log factor, written
/// directly on jets so tests do not depend on the expression parser.
inline MetricChart gaussian_bump(const MetricChart& base, Vec centre, double amp, double width2) {
  auto phi = [centre, amp, width2](const Vec& x) {
    Jet q = Jet::constant(0.0);
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
      const Jet d = Jet::variable(i, x[i]) - Jet::constant(centre[i]);
      q = q + d * d;
    }
    return Jet::constant(amp) * exp(-(q / Jet::constant(width2)));
  };
  return MetricChart::conformal(base, phi, "bump");
}

/// amp * exp(kappa * sum_i (cos 2 pi (x_i - centre_i) - 1)): smooth on the
/// unit torus, with a single maximum at centre.
inline MetricChart periodic_bump(const MetricChart& base, Vec centre, double amp, double kappa) {
  auto phi = [centre, amp, kappa](const Vec& x) {
    Jet q = Jet::constant(0.0);
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
      const Jet d = Jet::variable(i, x[i]) - Jet::constant(centre[i]);
      q = q + cos(Jet::constant(2.0 * std::numbers::pi) * d) - Jet::constant(1.0);
    }
    return Jet::constant(amp) * exp(Jet::constant(kappa) * q);
  };
  return MetricChart::conformal(base, phi, "periodic bump");
}

inline Vec random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v / v.norm();
}

}  // namespace test_support
