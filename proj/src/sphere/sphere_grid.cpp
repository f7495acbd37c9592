#include "isoprofile/sphere/sphere_grid.hpp"

#include <cmath>

#include "isoprofile/core/error.hpp"

namespace isoprofile::sphere {

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0;
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[count - 1 - i] = x;
    weights[i] = weights[count - 1 - i] = w;
  }
}

namespace {

// Fully normalized associated Legendre functions in the colatitude t with
// first and second t-derivatives; index [l][m] for m <= l <= degree.
struct Legendre {
  std::vector<std::vector<double>> p, dp, d2p;
};

Legendre normalized_legendre(int degree, double t) {
  const double x = std::cos(t), s = std::sin(t);
  Legendre L;
  L.p.assign(degree + 1, std::vector<double>(degree + 1, 0.0));
  L.dp = L.p;
  L.d2p = L.p;
  auto& p = L.p;
  auto& dp = L.dp;
  auto& d2p = L.d2p;
  p[0][0] = 1.0 / std::sqrt(2.0);
  for (int m = 1; m <= degree; ++m) {
    const double c = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    p[m][m] = c * s * p[m - 1][m - 1];
    dp[m][m] = c * (x * p[m - 1][m - 1] + s * dp[m - 1][m - 1]);
    d2p[m][m] = c * (-s * p[m - 1][m - 1] + 2.0 * x * dp[m - 1][m - 1] + s * d2p[m - 1][m - 1]);
  }
  for (int m = 0; m < degree; ++m) {
    const double c = std::sqrt(2.0 * m + 3.0);
    p[m + 1][m] = c * x * p[m][m];
    dp[m + 1][m] = c * (-s * p[m][m] + x * dp[m][m]);
    d2p[m + 1][m] = c * (-x * p[m][m] - 2.0 * s * dp[m][m] + x * d2p[m][m]);
  }
  for (int m = 0; m <= degree; ++m)
    for (int l = m + 2; l <= degree; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1.0));
      p[l][m] = a * (x * p[l - 1][m] - b * p[l - 2][m]);
      dp[l][m] = a * (-s * p[l - 1][m] + x * dp[l - 1][m] - b * dp[l - 2][m]);
      d2p[l][m] = a * (-x * p[l - 1][m] - 2.0 * s * dp[l - 1][m] + x * d2p[l - 1][m] -
                       b * d2p[l - 2][m]);
    }
  return L;
}

}  // namespace

SphereGrid::SphereGrid(int ambient_dim, int degree) : n_(ambient_dim), degree_(degree) {
  if (n_ != 2 && n_ != 3) throw Error(ErrorKind::InvalidArgument, "sphere grid needs n in {2,3}");
  if (degree_ < 1) throw Error(ErrorKind::InvalidArgument, "harmonic degree must be >= 1");

  if (n_ == 2) {
    const int count = 4 * degree_;
    ring_size_ = count;
    weights_ = Eigen::VectorXd::Constant(count, 2.0 * kPi / count);
    const int ncoef = 2 * degree_ + 1;
    basis_.resize(count, ncoef);
    // Full-resolution trigonometric basis for derivatives.
    deriv_analysis_.resize(count, count);
    b1_.resize(count, count);
    b11_.resize(count, count);
    Eigen::MatrixXd full(count, count);
    const double c0 = 1.0 / std::sqrt(2.0 * kPi), c1 = 1.0 / std::sqrt(kPi);
    const int half = count / 2;
    for (int j = 0; j < count; ++j) {
      const double phi = 2.0 * kPi * j / count;
      Vec t(2), dt(2);
      t << std::cos(phi), std::sin(phi);
      dt << -std::sin(phi), std::cos(phi);
      nodes_.push_back(t);
      dtheta1_.push_back(dt);
      angle1_.push_back(phi);
      angle2_.push_back(0.0);
      area_element_.push_back(1.0);
      full(j, 0) = c0;
      b1_(j, 0) = b11_(j, 0) = 0.0;
      for (int k = 1; k < half; ++k) {
        const double c = std::cos(k * phi), s = std::sin(k * phi);
        full(j, 2 * k - 1) = c1 * c;
        full(j, 2 * k) = c1 * s;
        b1_(j, 2 * k - 1) = -k * c1 * s;
        b1_(j, 2 * k) = k * c1 * c;
        b11_(j, 2 * k - 1) = -k * k * c1 * c;
        b11_(j, 2 * k) = -k * k * c1 * s;
      }
      const double cn = std::cos(half * phi);
      full(j, count - 1) = c0 * cn;
      b1_(j, count - 1) = 0.0;  // sin(half*phi) vanishes on the nodes
      b11_(j, count - 1) = -double(half) * half * c0 * cn;
    }
    basis_ = full.leftCols(ncoef);
    deriv_analysis_ = full.transpose() * weights_.asDiagonal();
    coeff_degree_.push_back(0);
    for (int k = 1; k <= degree_; ++k) {
      coeff_degree_.push_back(k);
      coeff_degree_.push_back(k);
    }
  } else {
    rings_ = degree_ + 1;
    ring_size_ = 2 * degree_ + 1;
    std::vector<double> gx, gw;
    gauss_legendre(rings_, gx, gw);
    const int count = rings_ * ring_size_;
    const int ncoef = (degree_ + 1) * (degree_ + 1);
    weights_.resize(count);
    basis_.resize(count, ncoef);
    b1_.resize(count, ncoef);
    b2_.resize(count, ncoef);
    b11_.resize(count, ncoef);
    b12_.resize(count, ncoef);
    b22_.resize(count, ncoef);
    coeff_degree_.resize(ncoef);
    for (int l = 0; l <= degree_; ++l)
      for (int k = l * l; k < (l + 1) * (l + 1); ++k) coeff_degree_[k] = l;
    const double c0 = 1.0 / std::sqrt(2.0 * kPi), c1 = 1.0 / std::sqrt(kPi);
    for (int r = 0; r < rings_; ++r) {
      // Colatitudes increase with the ring index.
      const double x = gx[rings_ - 1 - r];
      const double t = std::acos(x), st = std::sin(t);
      const Legendre L = normalized_legendre(degree_, t);
      for (int j = 0; j < ring_size_; ++j) {
        const int i = r * ring_size_ + j;
        const double phi = 2.0 * kPi * j / ring_size_;
        const double cp = std::cos(phi), sp = std::sin(phi);
        Vec th(3), d1(3), d2(3);
        th << st * cp, st * sp, x;
        d1 << x * cp, x * sp, -st;
        d2 << -st * sp, st * cp, 0.0;
        nodes_.push_back(th);
        dtheta1_.push_back(d1);
        dtheta2_.push_back(d2);
        angle1_.push_back(t);
        angle2_.push_back(phi);
        area_element_.push_back(st);
        weights_[i] = gw[rings_ - 1 - r] * 2.0 * kPi / ring_size_;
        for (int l = 0; l <= degree_; ++l) {
          const int k0 = l * l;
          basis_(i, k0) = c0 * L.p[l][0];
          b1_(i, k0) = c0 * L.dp[l][0];
          b11_(i, k0) = c0 * L.d2p[l][0];
          b2_(i, k0) = b12_(i, k0) = b22_(i, k0) = 0.0;
          for (int m = 1; m <= l; ++m) {
            const double cm = std::cos(m * phi), sm = std::sin(m * phi);
            const int kc = k0 + 2 * m - 1, ks = k0 + 2 * m;
            const double P = c1 * L.p[l][m], dP = c1 * L.dp[l][m], d2P = c1 * L.d2p[l][m];
            basis_(i, kc) = P * cm;
            basis_(i, ks) = P * sm;
            b1_(i, kc) = dP * cm;
            b1_(i, ks) = dP * sm;
            b11_(i, kc) = d2P * cm;
            b11_(i, ks) = d2P * sm;
            b2_(i, kc) = -m * P * sm;
            b2_(i, ks) = m * P * cm;
            b12_(i, kc) = -m * dP * sm;
            b12_(i, ks) = m * dP * cm;
            b22_(i, kc) = -double(m) * m * P * cm;
            b22_(i, ks) = -double(m) * m * P * sm;
          }
        }
      }
    }
  }
  analysis_ = basis_.transpose() * weights_.asDiagonal();
  if (n_ == 3) deriv_analysis_ = analysis_;
}

Eigen::VectorXd SphereGrid::analyze(const Eigen::VectorXd& values) const {
  return analysis_ * values;
}

Eigen::VectorXd SphereGrid::synthesize(const Eigen::VectorXd& coefficients) const {
  return basis_ * coefficients;
}

AngularDerivatives SphereGrid::derivatives(const Eigen::VectorXd& values) const {
  const Eigen::VectorXd c = deriv_analysis_ * values;
  AngularDerivatives d;
  d.d1 = b1_ * c;
  d.d11 = b11_ * c;
  if (n_ == 3) {
    d.d2 = b2_ * c;
    d.d12 = b12_ * c;
    d.d22 = b22_ * c;
  }
  return d;
}

GridPtr make_grid(int ambient_dim, int degree) {
  return std::make_shared<const SphereGrid>(ambient_dim, degree);
}

}  // namespace isoprofile::sphere
