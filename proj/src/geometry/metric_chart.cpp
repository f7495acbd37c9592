#include "isoprofile/geometry/metric_chart.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isoprofile/core/error.hpp"

namespace isoprofile::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxRadiusFraction = 0.8;

// Log factor of 4 delta / (1 + k |x|^2)^2.
Jet stereographic_log_factor(const Vec& x, double k) {
  const int n = static_cast<int>(x.size());
  const double q = 1.0 + k * x.squaredNorm();
  Jet f = Jet::constant(std::log(2.0) - std::log(q));
  for (int i = 0; i < n; ++i) {
    f.grad[i] = -2.0 * k * x[i] / q;
    for (int j = 0; j < n; ++j)
      f.hess[i][j] = (i == j ? -2.0 * k / q : 0.0) + 4.0 * k * k * x[i] * x[j] / (q * q);
  }
  return f;
}

std::string format_k0(double k) {
  std::ostringstream os;
  os << k;
  return os.str();
}

}  // namespace

struct MetricChart::Impl {
  int dim = 2;
  std::string label;
  BaseKind base = BaseKind::Euclidean;
  double k0 = 0.0;
  ChartDomain domain;
  ChristoffelMode mode = ChristoffelMode::Analytic;
  double fd_step = 1e-3;
  int steps_per_unit = 64;
  int max_steps = 1'000'000;
  double length_scale = 1.0;
  LogFactorFn phi;   // conformal perturbation, may be empty
  MetricFn general;  // only for BaseKind::General

  bool analytic() const { return base != BaseKind::General; }

  Jet log_factor(const Vec& xw) const {
    Jet f;
    if (base == BaseKind::Sphere || base == BaseKind::Hyperbolic)
      f = stereographic_log_factor(xw, k0);
    if (phi) f = f + phi(xw);
    return f;
  }
};

MetricChart::MetricChart(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

namespace {

void check_dim(int dim) {
  if (dim != 2 && dim != 3)
    throw Error(ErrorKind::InvalidArgument, "chart dimension must be 2 or 3");
}

ChartDomain box_domain(int dim, double half_width) {
  ChartDomain d;
  d.lo = Vec::Constant(dim, -half_width);
  d.hi = Vec::Constant(dim, half_width);
  return d;
}

}  // namespace

MetricChart::MetricChart() : MetricChart(euclidean(2)) {}

MetricChart MetricChart::euclidean(int dim) {
  check_dim(dim);
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->label = "euclidean";
  impl->base = BaseKind::Euclidean;
  impl->domain = box_domain(dim, 10.0);
  return MetricChart(std::move(impl));
}

MetricChart MetricChart::sphere_stereographic(int dim, double k0) {
  check_dim(dim);
  if (!(k0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "sphere requires k0 > 0");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->label = "sphere(k0=" + format_k0(k0) + ")";
  impl->base = BaseKind::Sphere;
  impl->k0 = k0;
  impl->length_scale = 1.0 / std::sqrt(k0);
  impl->domain = box_domain(dim, 4.0 / std::sqrt(k0));
  return MetricChart(std::move(impl));
}

MetricChart MetricChart::hyperbolic_poincare(int dim, double k0) {
  check_dim(dim);
  if (!(k0 < 0.0)) throw Error(ErrorKind::InvalidArgument, "hyperbolic requires k0 < 0");
  auto impl = std::make_shared<Impl>();
  const double radius = 1.0 / std::sqrt(-k0);
  impl->dim = dim;
  impl->label = "hyperbolic(k0=" + format_k0(k0) + ")";
  impl->base = BaseKind::Hyperbolic;
  impl->k0 = k0;
  impl->length_scale = radius;
  impl->domain = box_domain(dim, radius);
  impl->domain.ball_radius = radius;
  return MetricChart(std::move(impl));
}

MetricChart MetricChart::flat_torus(int dim) {
  check_dim(dim);
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->label = "flat_torus";
  impl->base = BaseKind::FlatTorus;
  impl->length_scale = 0.5;
  impl->domain.lo = Vec::Zero(dim);
  impl->domain.hi = Vec::Ones(dim);
  impl->domain.periodic = true;
  return MetricChart(std::move(impl));
}

MetricChart MetricChart::conformal(const MetricChart& base, LogFactorFn phi,
                                   std::string phi_label) {
  if (!base.has_analytic())
    throw Error(ErrorKind::InvalidArgument, "conformal perturbation needs a catalog base");
  if (base.impl_->phi)
    throw Error(ErrorKind::InvalidArgument, "base metric is already perturbed");
  auto impl = std::make_shared<Impl>(*base.impl_);
  impl->phi = std::move(phi);
  impl->label = base.label() + "*exp(2*(" + phi_label + "))";
  return MetricChart(std::move(impl));
}

MetricChart MetricChart::general(int dim, MetricFn metric, ChartDomain domain,
                                 double length_scale, std::string label) {
  check_dim(dim);
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->label = std::move(label);
  impl->base = BaseKind::General;
  impl->domain = std::move(domain);
  impl->length_scale = length_scale;
  impl->general = std::move(metric);
  impl->mode = ChristoffelMode::FiniteDifference;
  return MetricChart(std::move(impl));
}

int MetricChart::dim() const { return impl_->dim; }
const std::string& MetricChart::label() const { return impl_->label; }
BaseKind MetricChart::base() const { return impl_->base; }
double MetricChart::k0() const { return impl_->k0; }
const ChartDomain& MetricChart::domain() const { return impl_->domain; }
ChristoffelMode MetricChart::christoffel_mode() const { return impl_->mode; }
double MetricChart::fd_step() const { return impl_->fd_step; }
int MetricChart::steps_per_unit() const { return impl_->steps_per_unit; }
int MetricChart::max_steps() const { return impl_->max_steps; }
bool MetricChart::has_analytic() const { return impl_->analytic(); }
bool MetricChart::is_conformal_perturbation() const { return static_cast<bool>(impl_->phi); }
double MetricChart::length_scale() const { return impl_->length_scale; }

MetricChart MetricChart::with_christoffel_mode(ChristoffelMode mode) const {
  if (mode == ChristoffelMode::Analytic && !has_analytic())
    throw Error(ErrorKind::InvalidArgument, "analytic Christoffels unavailable for " + label());
  auto impl = std::make_shared<Impl>(*impl_);
  impl->mode = mode;
  return MetricChart(std::move(impl));
}

MetricChart MetricChart::with_fd_step(double h) const {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "fd_step must be positive");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->fd_step = h;
  return MetricChart(std::move(impl));
}

MetricChart MetricChart::with_steps_per_unit(int steps) const {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps_per_unit must be >= 1");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->steps_per_unit = steps;
  return MetricChart(std::move(impl));
}

Vec MetricChart::wrap(const Vec& x) const {
  if (!impl_->domain.periodic) return x;
  Vec w = x;
  for (int i = 0; i < dim(); ++i) {
    const double lo = impl_->domain.lo[i];
    const double period = impl_->domain.hi[i] - lo;
    w[i] = lo + (x[i] - lo) - period * std::floor((x[i] - lo) / period);
    if (w[i] >= impl_->domain.hi[i]) w[i] = lo;
  }
  return w;
}

Vec MetricChart::displacement(const Vec& from, const Vec& to) const {
  Vec d = to - from;
  if (!impl_->domain.periodic) return d;
  for (int i = 0; i < dim(); ++i) {
    const double period = impl_->domain.hi[i] - impl_->domain.lo[i];
    d[i] -= period * std::round(d[i] / period);
  }
  return d;
}

double MetricChart::margin(const Vec& x) const {
  const auto& d = impl_->domain;
  if (d.periodic) return 0.5 * (d.hi - d.lo).minCoeff();
  double m = kInf;
  for (int i = 0; i < dim(); ++i) m = std::min({m, x[i] - d.lo[i], d.hi[i] - x[i]});
  if (std::isfinite(d.ball_radius)) m = std::min(m, d.ball_radius - x.norm());
  return m;
}

bool MetricChart::contains(const Vec& x, double required_margin) const {
  if (!x.allFinite()) return false;
  if (impl_->domain.periodic) return true;
  return margin(x) >= required_margin;
}

double MetricChart::chart_radius(const Vec& p) const {
  const Eigen::SelfAdjointEigenSolver<Mat> eig(metric(p), Eigen::EigenvaluesOnly);
  return margin(p) * std::sqrt(eig.eigenvalues().minCoeff());
}

double MetricChart::max_radius(const Vec& p) const {
  return kMaxRadiusFraction * chart_radius(p);
}

Mat MetricChart::metric(const Vec& x) const {
  if (!contains(x, 0.0)) {
    std::ostringstream os;
    os << "point (" << x.transpose() << ") outside chart " << label();
    throw Error(ErrorKind::OutOfChart, os.str());
  }
  const Vec xw = wrap(x);
  if (impl_->analytic()) {
    const double scale = std::exp(2.0 * impl_->log_factor(xw).value);
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw Error(ErrorKind::DegenerateMetric, "conformal factor not positive and finite");
    return scale * Mat::Identity(dim(), dim());
  }
  Mat g = impl_->general(xw);
  g = 0.5 * (g + g.transpose()).eval();
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::DegenerateMetric, "metric not positive definite");
  return g;
}

Mat MetricChart::frame(const Vec& p) const {
  const Mat g = metric(p);
  if (impl_->analytic()) return Mat::Identity(dim(), dim()) / std::sqrt(g(0, 0));
  const Eigen::SelfAdjointEigenSolver<Mat> eig(g);
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

Jet MetricChart::log_factor(const Vec& x) const {
  if (!impl_->analytic())
    throw Error(ErrorKind::InvalidArgument, "no analytic log factor for " + label());
  return impl_->log_factor(wrap(x));
}

namespace {

Christoffel analytic_christoffel(int n, const Jet& f) {
  Christoffel c;
  c.dim = n;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        c.symbols[k][i][j] = (i == k ? f.grad[j] : 0.0) + (j == k ? f.grad[i] : 0.0) -
                             (i == j ? f.grad[k] : 0.0);
  return c;
}

// Five-point central difference of a matrix-valued function along axis l.
template <class F>
auto central_difference(const F& fn, const Vec& x, int axis, double h) {
  Vec e = Vec::Zero(x.size());
  e[axis] = h;
  return ((fn(x - 2.0 * e) - 8.0 * fn(x - e) + 8.0 * fn(x + e) - fn(x + 2.0 * e)) /
          (12.0 * h))
      .eval();
}

Christoffel fd_christoffel(const MetricChart& chart, const Vec& x) {
  const int n = chart.dim();
  const double h = chart.fd_step();
  const auto g_of = [&](const Vec& y) { return chart.metric(y); };
  std::array<Mat, 3> dg;  // dg[l](i,j) = d_l g_ij
  for (int l = 0; l < n; ++l) dg[l] = central_difference(g_of, x, l, h);
  const Mat ginv = chart.metric(x).inverse();
  Christoffel c;
  c.dim = n;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        c.symbols[k][i][j] = 0.5 * s;
      }
  return c;
}

}  // namespace

Christoffel MetricChart::christoffel_unchecked(const Vec& x) const {
  if (impl_->mode == ChristoffelMode::Analytic && impl_->analytic())
    return analytic_christoffel(dim(), impl_->log_factor(wrap(x)));
  return fd_christoffel(*this, x);
}

Christoffel christoffel(const MetricChart& chart, const Vec& x) {
  if (!chart.contains(x, 2.0 * chart.fd_step()))
    throw Error(ErrorKind::OutOfChart, "christoffel: point within 2*fd_step of chart boundary");
  return chart.christoffel_unchecked(x);
}

namespace {

using GammaDerivative = std::array<Christoffel, 3>;  // [l] = d_l Gamma

GammaDerivative analytic_dgamma(int n, const Jet& f) {
  GammaDerivative d;
  for (int l = 0; l < n; ++l) {
    d[l].dim = n;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          d[l].symbols[k][i][j] = (i == k ? f.hess[j][l] : 0.0) +
                                  (j == k ? f.hess[i][l] : 0.0) -
                                  (i == j ? f.hess[k][l] : 0.0);
  }
  return d;
}

GammaDerivative fd_dgamma(const MetricChart& chart, const Vec& x) {
  const int n = chart.dim();
  const double h = chart.fd_step();
  GammaDerivative d;
  for (int l = 0; l < n; ++l) {
    Vec e = Vec::Zero(n);
    e[l] = h;
    const Christoffel m2 = chart.christoffel_unchecked(x - 2.0 * e);
    const Christoffel m1 = chart.christoffel_unchecked(x - e);
    const Christoffel p1 = chart.christoffel_unchecked(x + e);
    const Christoffel p2 = chart.christoffel_unchecked(x + 2.0 * e);
    d[l].dim = n;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          d[l].symbols[k][i][j] = (m2(k, i, j) - 8.0 * m1(k, i, j) + 8.0 * p1(k, i, j) -
                                   p2(k, i, j)) /
                                  (12.0 * h);
  }
  return d;
}

}  // namespace

CurvaturePack curvature_at(const MetricChart& chart, const Vec& p) {
  if (!chart.contains(p, 4.0 * chart.fd_step()))
    throw Error(ErrorKind::OutOfChart, "curvature_at: point within 4*fd_step of chart boundary");
  const int n = chart.dim();
  const bool analytic =
      chart.christoffel_mode() == ChristoffelMode::Analytic && chart.has_analytic();
  Christoffel gamma;
  GammaDerivative dgamma;
  if (analytic) {
    const Jet f = chart.log_factor(p);
    gamma = analytic_christoffel(n, f);
    dgamma = analytic_dgamma(n, f);
  } else {
    gamma = chart.christoffel_unchecked(p);
    dgamma = fd_dgamma(chart, p);
  }
  const Mat g = chart.metric(p);

  // R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
  CurvaturePack::Riemann up{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = dgamma[i](l, j, k) - dgamma[j](l, i, k);
          for (int m = 0; m < n; ++m) s += gamma(l, i, m) * gamma(m, j, k) - gamma(l, j, m) * gamma(m, i, k);
          up[i][j][k][l] = s;
        }

  CurvaturePack pack;
  pack.dim = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) s += g(l, m) * up[i][j][k][m];
          pack.riemann[i][j][k][l] = s;
        }
  pack.ricci = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) pack.ricci(j, k) += up[i][j][k][i];
  pack.ricci = 0.5 * (pack.ricci + pack.ricci.transpose()).eval();
  pack.scalar = (g.inverse() * pack.ricci).trace();
  pack.metric = g;
  return pack;
}

double scalar_curvature(const MetricChart& chart, const Vec& p) {
  return curvature_at(chart, p).scalar;
}

}  // namespace isoprofile::geometry
