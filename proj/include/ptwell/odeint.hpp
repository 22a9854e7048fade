#pragma once

#include <cmath>
#include <functional>

#include "ptwell/common.hpp"

namespace ptwell {

// Wavefunction data carried along an integration path. The pair (psi, dpsi)
// is stored with an exponential prefactor split off:
//   actual psi  = psi  * exp(log_scale)
//   actual psi' = dpsi * exp(log_scale)
// so that traversals of growth regions never overflow.
struct PsiState {
  cplx psi{1.0, 0.0};
  cplx dpsi{0.0, 0.0};
  double log_scale = 0.0;

  cplx value() const { return psi * std::exp(log_scale); }
  cplx derivative() const { return dpsi * std::exp(log_scale); }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c[7] = {0.0,     1.0 / 5, 3.0 / 10, 4.0 / 5,
                                   8.0 / 9, 1.0,     1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_b5[7] = {35.0 / 384,    0.0,  500.0 / 1113,
                                    125.0 / 192,   -2187.0 / 6784,
                                    11.0 / 84,     0.0};
inline constexpr double dp_b4[7] = {5179.0 / 57600,   0.0,
                                    7571.0 / 16695,   393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100,
                                    1.0 / 40};

}  // namespace detail

// Integrates psi'' = q(z) psi along the straight segment from z0 to z1,
// starting from state y0 given at z0. Adaptive Dormand-Prince with the
// logarithmic prefactor re-normalized after every accepted step.
template <typename Q>
PsiState integrate_schrodinger(Q&& q, cplx z0, cplx z1, PsiState y0,
                               double rel_tol = 1e-12,
                               std::size_t max_steps = 4000000) {
  const cplx d = z1 - z0;
  const double len = std::abs(d);
  if (len == 0.0) return y0;

  // Work in the segment parameter t in [0,1]; u = (psi, d psi/dt).
  struct U {
    cplx a, b;
  };
  auto rhs = [&](double t, const U& u) -> U {
    return {u.b, d * d * q(z0 + t * d) * u.a};
  };

  U u{y0.psi, y0.dpsi * d};
  double log_scale = y0.log_scale;
  double t = 0.0;
  double h = 0.05;
  std::size_t steps = 0;

  while (t < 1.0) {
    if (++steps > max_steps)
      throw NoConvergence("integrate_schrodinger: step budget exhausted");
    if (t + h > 1.0) h = 1.0 - t;

    U k[7];
    k[0] = rhs(t, u);
    for (int s = 1; s < 7; ++s) {
      U us = u;
      for (int j = 0; j < s; ++j) {
        us.a += h * detail::dp_a[s][j] * k[j].a;
        us.b += h * detail::dp_a[s][j] * k[j].b;
      }
      k[s] = rhs(t + detail::dp_c[s] * h, us);
    }
    U u5 = u, u4 = u;
    for (int s = 0; s < 7; ++s) {
      u5.a += h * detail::dp_b5[s] * k[s].a;
      u5.b += h * detail::dp_b5[s] * k[s].b;
      u4.a += h * detail::dp_b4[s] * k[s].a;
      u4.b += h * detail::dp_b4[s] * k[s].b;
    }
    double scale = std::max({std::abs(u5.a), std::abs(u5.b), 1e-290});
    double err =
        std::max(std::abs(u5.a - u4.a), std::abs(u5.b - u4.b)) / scale;
    double tol = std::max(rel_tol, 1e-15);
    if (err <= tol || h <= 1e-14) {
      t += h;
      u = u5;
      if (scale > 1e100 || scale < 1e-100) {
        u.a /= scale;
        u.b /= scale;
        log_scale += std::log(scale);
      }
      if (!std::isfinite(std::abs(u.a)) || !std::isfinite(std::abs(u.b)))
        throw OverflowRegime("integrate_schrodinger: non-finite state");
    }
    double factor = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    h = std::min(h, 0.25);
  }

  PsiState out;
  out.psi = u.a;
  out.dpsi = u.b / d;
  out.log_scale = log_scale;
  return out;
}

}  // namespace ptwell
