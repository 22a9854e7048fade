#pragma once

#include <vector>

#include "ptwell/common.hpp"

namespace ptwell {

// Truncated Taylor series (forward-mode jets) around a base point. Used to
// feed exact derivatives of the momentum recursion without symbolic algebra.
struct Jet {
  std::vector<cplx> c;  // c[k] = k-th Taylor coefficient

  Jet() = default;
  explicit Jet(int order) : c(order + 1, cplx(0.0)) {}

  int order() const { return static_cast<int>(c.size()) - 1; }
  cplx value() const { return c.empty() ? cplx(0.0) : c[0]; }

  static Jet constant(cplx v, int order) {
    Jet j(order);
    j.c[0] = v;
    return j;
  }
  static Jet variable(cplx v, int order) {
    Jet j(order);
    j.c[0] = v;
    if (order >= 1) j.c[1] = 1.0;
    return j;
  }
};

inline Jet truncate(const Jet& a, int order) {
  Jet r(order);
  for (int k = 0; k <= order && k <= a.order(); ++k) r.c[k] = a.c[k];
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  int n = std::min(a.order(), b.order());
  Jet r(n);
  for (int k = 0; k <= n; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  int n = std::min(a.order(), b.order());
  Jet r(n);
  for (int k = 0; k <= n; ++k) r.c[k] = a.c[k] - b.c[k];
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  int n = std::min(a.order(), b.order());
  Jet r(n);
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= k; ++j) r.c[k] += a.c[j] * b.c[k - j];
  return r;
}

inline Jet operator*(cplx s, const Jet& a) {
  Jet r = a;
  for (auto& v : r.c) v *= s;
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  if (std::abs(b.value()) == 0.0)
    throw PoleOnEvaluation("jet division by a vanishing series");
  int n = std::min(a.order(), b.order());
  Jet r(n);
  for (int k = 0; k <= n; ++k) {
    cplx s = k <= a.order() ? a.c[k] : cplx(0.0);
    for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
    r.c[k] = s / b.c[0];
  }
  return r;
}

// Square root with the branch chosen nearest to `ref` (principal if ref = 0).
inline Jet jet_sqrt(const Jet& a, cplx ref = cplx(0.0)) {
  cplx s0 = std::sqrt(a.value());
  if (ref != cplx(0.0) && std::abs(s0 - ref) > std::abs(s0 + ref)) s0 = -s0;
  if (std::abs(s0) == 0.0)
    throw NearTurningPoint("jet_sqrt at a branch point");
  Jet r(a.order());
  r.c[0] = s0;
  for (int k = 1; k <= a.order(); ++k) {
    cplx s = a.c[k];
    for (int j = 1; j < k; ++j) s -= r.c[j] * r.c[k - j];
    r.c[k] = s / (2.0 * s0);
  }
  return r;
}

// d/dz, one order lower.
inline Jet jet_derivative(const Jet& a) {
  if (a.order() < 1) throw std::domain_error("jet_derivative: order too low");
  Jet r(a.order() - 1);
  for (int k = 0; k < a.order(); ++k) r.c[k] = double(k + 1) * a.c[k + 1];
  return r;
}

}  // namespace ptwell
