#include "isoprofile/sphere/field.hpp"

#include <cstdio>
#include <ostream>

#include "isoprofile/core/error.hpp"

namespace isoprofile::sphere {

SphericalField::SphericalField(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_->size())
    throw Error(ErrorKind::InvalidArgument, "field size does not match grid");
}

SphericalField SphericalField::constant(GridPtr grid, double c) {
  const auto n = static_cast<Eigen::Index>(grid->size());
  return SphericalField(std::move(grid), Eigen::VectorXd::Constant(n, c));
}

SphericalField SphericalField::from_function(GridPtr grid,
                                             const std::function<double(const Vec&)>& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t i = 0; i < grid->size(); ++i) v[static_cast<Eigen::Index>(i)] = f(grid->node(i));
  return SphericalField(std::move(grid), std::move(v));
}

SphericalField SphericalField::from_coefficients(GridPtr grid,
                                                 const Eigen::VectorXd& coefficients) {
  Eigen::VectorXd v = grid->synthesize(coefficients);
  return SphericalField(std::move(grid), std::move(v));
}

double SphericalField::degree_norm(int l) const {
  const Eigen::VectorXd c = coefficients();
  double s = 0.0;
  for (int k = 0; k < c.size(); ++k)
    if (grid_->degree_of(k) == l) s += c[k] * c[k];
  return std::sqrt(s);
}

SphericalField& SphericalField::operator+=(const SphericalField& o) {
  values_ += o.values_;
  return *this;
}

SphericalField& SphericalField::operator-=(const SphericalField& o) {
  values_ -= o.values_;
  return *this;
}

SphericalField& SphericalField::operator*=(double s) {
  values_ *= s;
  return *this;
}

SphericalField operator+(SphericalField a, const SphericalField& b) { return a += b; }
SphericalField operator-(SphericalField a, const SphericalField& b) { return a -= b; }
SphericalField operator*(double s, SphericalField a) { return a *= s; }

double integrate(const SphericalField& f) { return f.grid()->weights().dot(f.values()); }

Vec first_moment(const SphericalField& f) {
  const auto& g = *f.grid();
  Vec m = Vec::Zero(g.ambient_dim());
  for (std::size_t i = 0; i < g.size(); ++i)
    m += g.weights()[static_cast<Eigen::Index>(i)] * f[i] * g.node(i);
  return m;
}

SphericalField project_P(const SphericalField& f) {
  const auto& g = *f.grid();
  const Vec m = (g.ambient_dim() / g.measure()) * first_moment(f);
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) v[static_cast<Eigen::Index>(i)] = m.dot(g.node(i));
  return SphericalField(f.grid(), std::move(v));
}

SphericalField project_Q(const SphericalField& f) { return f - project_P(f); }

double L_multiplier(int n, int l) { return double(l) * (l + n - 2) - (n - 1); }

SphericalField apply_L(const SphericalField& v) {
  const auto& g = *v.grid();
  Eigen::VectorXd c = v.coefficients();
  for (int k = 0; k < c.size(); ++k) c[k] *= L_multiplier(g.ambient_dim(), g.degree_of(k));
  return SphericalField::from_coefficients(v.grid(), c);
}

SphericalField solve_L(const SphericalField& rhs, double tol) {
  const auto& g = *rhs.grid();
  const double p_norm = project_P(rhs).max_abs();
  if (p_norm > tol * std::max(1.0, rhs.max_abs())) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "solve_L: |P(rhs)| = %.3e is not below tolerance", p_norm);
    throw Error(ErrorKind::RhsNotInRange, buf);
  }
  Eigen::VectorXd c = rhs.coefficients();
  for (int k = 0; k < c.size(); ++k) {
    const int l = g.degree_of(k);
    c[k] = l == 1 ? 0.0 : c[k] / L_multiplier(g.ambient_dim(), l);
  }
  return SphericalField::from_coefficients(rhs.grid(), c);
}

SphericalField band_limit(const SphericalField& f) {
  return SphericalField::from_coefficients(f.grid(), f.coefficients());
}

void write_csv(std::ostream& out, const SphericalField& f) {
  const auto& g = *f.grid();
  const int n = g.ambient_dim();
  for (int i = 0; i < n; ++i) out << "theta" << i + 1 << ',';
  out << "value\r\n";
  char buf[32];
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int k = 0; k < n; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,", g.node(i)[k]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\r\n", f[i]);
    out << buf;
  }
}

}  // namespace isoprofile::sphere
