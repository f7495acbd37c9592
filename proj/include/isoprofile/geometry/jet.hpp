#pragma once

#include <array>
#include <cmath>

namespace isoprofile::geometry {

/// Second-order forward-mode jet in up to three variables: value, gradient
/// and Hessian. Unused trailing components stay zero.
struct Jet {
  double value = 0.0;
  std::array<double, 3> grad{};
  std::array<std::array<double, 3>, 3> hess{};

  static Jet constant(double c) {
    Jet j;
    j.value = c;
    return j;
  }

  static Jet variable(int index, double at) {
    Jet j;
    j.value = at;
    j.grad[index] = 1.0;
    return j;
  }

  bool is_constant() const {
    for (int i = 0; i < 3; ++i) {
      if (grad[i] != 0.0) return false;
      for (int k = 0; k < 3; ++k)
        if (hess[i][k] != 0.0) return false;
    }
    return true;
  }
};

/// f(a) lifted through the chain rule given f, f', f'' at a.value.
inline Jet compose(const Jet& a, double f, double df, double d2f) {
  Jet r;
  r.value = f;
  for (int i = 0; i < 3; ++i) {
    r.grad[i] = df * a.grad[i];
    for (int k = 0; k < 3; ++k)
      r.hess[i][k] = df * a.hess[i][k] + d2f * a.grad[i] * a.grad[k];
  }
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.value = a.value + b.value;
  for (int i = 0; i < 3; ++i) {
    r.grad[i] = a.grad[i] + b.grad[i];
    for (int k = 0; k < 3; ++k) r.hess[i][k] = a.hess[i][k] + b.hess[i][k];
  }
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r;
  r.value = -a.value;
  for (int i = 0; i < 3; ++i) {
    r.grad[i] = -a.grad[i];
    for (int k = 0; k < 3; ++k) r.hess[i][k] = -a.hess[i][k];
  }
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.value = a.value * b.value;
  for (int i = 0; i < 3; ++i) {
    r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
    for (int k = 0; k < 3; ++k)
      r.hess[i][k] = a.hess[i][k] * b.value + a.value * b.hess[i][k] +
                     a.grad[i] * b.grad[k] + a.grad[k] * b.grad[i];
  }
  return r;
}

inline Jet reciprocal(const Jet& a) {
  const double inv = 1.0 / a.value;
  return compose(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value);
  return compose(a, e, e, e);
}

inline Jet log(const Jet& a) {
  return compose(a, std::log(a.value), 1.0 / a.value, -1.0 / (a.value * a.value));
}

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value), c = std::cos(a.value);
  return compose(a, s, c, -s);
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value), c = std::cos(a.value);
  return compose(a, c, -s, -c);
}

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.value);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.value));
}

/// a^b. Constant exponents use the power rule so negative bases work with
/// integer exponents; otherwise exp(b log a).
inline Jet pow(const Jet& a, const Jet& b) {
  if (b.is_constant()) {
    const double k = b.value;
    if (k == 0.0) return Jet::constant(1.0);
    if (k == 1.0) return a;
    const double f = std::pow(a.value, k);
    const double df = k * std::pow(a.value, k - 1.0);
    const double d2f = k == 2.0 ? 2.0 : k * (k - 1.0) * std::pow(a.value, k - 2.0);
    return compose(a, f, df, d2f);
  }
  return exp(b * log(a));
}

}  // namespace isoprofile::geometry
