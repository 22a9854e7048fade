#pragma once

// Small independent oracles used to pin expected values in the tests.
// Everything here deliberately avoids the library's own code paths.

#include <cmath>
#include <complex>

namespace oracles {

using cplxl = std::complex<long double>;

// Root of y^3 + y = E on (0, inf) by plain bisection.
inline double bisect_imag_turning_point(double energy, double tol = 1e-14) {
  double lo = 0.0, hi = std::max(1.0, energy);
  while (hi * hi * hi + hi < energy) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    double m = 0.5 * (lo + hi);
    ((m * m * m + m < energy) ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

// Extended-precision evaluation of the parameter map
// beta^{+-}(h) = exp(-+ i 5pi/4) 3^{-5/4} h.
inline std::complex<double> beta_map(std::complex<double> h, int branch) {
  const long double pil = 3.14159265358979323846264338327950288L;
  long double phase = (branch >= 0 ? -1.0L : 1.0L) * 5.0L * pil / 4.0L;
  cplxl w(std::cos((double)phase), std::sin((double)phase));
  long double mag = std::pow(3.0L, -1.25L);
  cplxl r = w * mag * cplxl(h.real(), h.imag());
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

// Extended-precision -h^{-4/5} for real positive h.
inline double alpha_map_real(double h) {
  return static_cast<double>(-std::pow((long double)h, -0.8L));
}

// Orthonormal-Hermite-basis matrix entries of x^3, from the ladder algebra:
//   <k| x^3 |k+3> = sqrt((k+1)(k+2)(k+3)) / (2 sqrt 2)
//   <k| x^3 |k+1> = 3 (k+1)^{3/2} / (2 sqrt 2)
inline double x3_entry_far(int k) {
  return std::sqrt(double(k + 1) * (k + 2) * (k + 3)) / (2.0 * std::sqrt(2.0));
}
inline double x3_entry_near(int k) {
  return 3.0 * std::pow(double(k + 1), 1.5) / (2.0 * std::sqrt(2.0));
}

}  // namespace oracles
