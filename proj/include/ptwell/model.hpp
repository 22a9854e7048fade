#pragma once

#include <array>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "ptwell/common.hpp"

namespace ptwell {

// Semiclassical parameter restricted to the sector C0.
struct HbarParam {
  cplx value;
  explicit HbarParam(cplx v) : value(v) {
    if (!in_sector_c0(v))
      throw std::domain_error(
          "hbar must be nonzero with |arg| < pi/4 (sector C0)");
  }
};

enum class Representation {
  SemiclassicalH,   // hbar^2 p^2 + i(x^3 - x)
  ScaledK,          // p^2 + i(x^3 + alpha x)
  PerturbativeB,    // p^2 + x^2 + i sqrt(beta) x^3
  RotatedImagAxis,  // hbar^2 p^2 - x^3 - x (the operator seen on the imaginary axis)
};

inline const char* representation_name(Representation r) {
  switch (r) {
    case Representation::SemiclassicalH: return "H";
    case Representation::ScaledK: return "K";
    case Representation::PerturbativeB: return "B";
    case Representation::RotatedImagAxis: return "R";
  }
  return "?";
}

// One member of the operator family: a representation tag plus its parameter
// (hbar, alpha, or beta).
struct PotentialSpec {
  Representation representation = Representation::SemiclassicalH;
  cplx parameter{1.0, 0.0};

  static PotentialSpec semiclassical_h(cplx hbar) {
    if (hbar == cplx(0.0)) throw std::domain_error("hbar must be nonzero");
    return {Representation::SemiclassicalH, hbar};
  }
  static PotentialSpec scaled_k(cplx alpha) {
    if (!in_sector_alpha(alpha))
      throw std::domain_error("alpha outside its analyticity sector");
    return {Representation::ScaledK, alpha};
  }
  static PotentialSpec perturbative_b(cplx beta) {
    return {Representation::PerturbativeB, beta};
  }
  static PotentialSpec rotated_imag_axis(cplx hbar) {
    if (hbar == cplx(0.0)) throw std::domain_error("hbar must be nonzero");
    return {Representation::RotatedImagAxis, hbar};
  }
  // Harmonic test family: the beta = 0 member, p^2 + x^2.
  static PotentialSpec harmonic() { return perturbative_b(0.0); }

  bool is_harmonic() const {
    return representation == Representation::PerturbativeB &&
           parameter == cplx(0.0);
  }

  // V(z) = c[3] z^3 + c[2] z^2 + c[1] z + c[0]
  std::array<cplx, 4> v_coefficients() const {
    switch (representation) {
      case Representation::SemiclassicalH:
        return {cplx(0.0), -iu, cplx(0.0), iu};
      case Representation::ScaledK:
        return {cplx(0.0), iu * parameter, cplx(0.0), iu};
      case Representation::PerturbativeB:
        return {cplx(0.0), cplx(0.0), cplx(1.0), iu * std::sqrt(parameter)};
      case Representation::RotatedImagAxis:
        return {cplx(0.0), cplx(-1.0), cplx(0.0), cplx(-1.0)};
    }
    throw std::logic_error("unknown representation");
  }

  cplx potential(cplx z) const {
    auto c = v_coefficients();
    return ((c[3] * z + c[2]) * z + c[1]) * z + c[0];
  }
  cplx potential_derivative(cplx z) const {
    auto c = v_coefficients();
    return (3.0 * c[3] * z + 2.0 * c[2]) * z + c[1];
  }
  // Coefficient of p^2 = -d^2/dz^2 in the Schrodinger operator.
  cplx kinetic() const {
    switch (representation) {
      case Representation::SemiclassicalH:
      case Representation::RotatedImagAxis:
        return parameter * parameter;
      default:
        return cplx(1.0);
    }
  }
};

// --------------------------------------------------------------------------
// Parameter and energy scalings between the three representations.

// beta^{+-}(hbar) = exp(-+ i 5pi/4) 3^{-5/4} hbar. Rejects hbar outside C0.
inline cplx to_beta(const HbarParam& h, int branch) {
  const double sign = branch >= 0 ? -1.0 : 1.0;
  return std::exp(sign * iu * (5.0 * pi / 4.0)) * std::pow(3.0, -1.25) *
         h.value;
}

// alpha = -hbar^{-4/5}, principal branch (single valued on C0).
inline cplx to_alpha(cplx hbar) {
  if (hbar == cplx(0.0)) throw std::domain_error("hbar must be nonzero");
  return -std::pow(hbar, -0.8);
}

// E(hbar) = hbar^{6/5} Ehat(alpha), principal branch.
inline cplx scale_energy_k_to_h(cplx hbar, cplx e_k) {
  return std::pow(hbar, 1.2) * e_k;
}
inline cplx scale_energy_h_to_k(cplx hbar, cplx e_h) {
  return std::pow(hbar, -1.2) * e_h;
}

// --------------------------------------------------------------------------
// Wells of the cubic family and the bottom energy.

struct WellData {
  double x_minus = -1.0 / std::sqrt(3.0);
  double x_plus = 1.0 / std::sqrt(3.0);
  cplx bottom_energy{0.0, 2.0 / (3.0 * std::sqrt(3.0))};  // V(x_minus)
};

// --------------------------------------------------------------------------
// Turning points: the roots of V(z) - E.

struct TurningPointSet {
  cplx i_minus, i_zero, i_plus;
  cplx energy;
  bool coalescent = false;
  double min_separation = 0.0;
  std::array<cplx, 3> all() const { return {i_minus, i_zero, i_plus}; }
};

// Roots of c3 z^3 + c2 z^2 + c1 z + c0 via companion-matrix eigenvalues,
// then a couple of Newton polish steps per root.
inline std::array<cplx, 3> cubic_roots(cplx c3, cplx c2, cplx c1, cplx c0) {
  if (std::abs(c3) == 0.0)
    throw std::domain_error("cubic_roots: leading coefficient vanishes");
  Eigen::Matrix3cd comp = Eigen::Matrix3cd::Zero();
  comp(0, 2) = -c0 / c3;
  comp(1, 2) = -c1 / c3;
  comp(2, 2) = -c2 / c3;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(comp, false);
  std::array<cplx, 3> roots;
  for (int k = 0; k < 3; ++k) {
    cplx z = es.eigenvalues()(k);
    for (int it = 0; it < 3; ++it) {
      cplx p = ((c3 * z + c2) * z + c1) * z + c0;
      cplx dp = (3.0 * c3 * z + 2.0 * c2) * z + c1;
      if (std::abs(dp) == 0.0) break;
      cplx step = p / dp;
      if (!std::isfinite(std::abs(step))) break;
      // Near a double root the Newton step can overshoot badly; damp it.
      if (std::abs(step) > 0.5 * (1.0 + std::abs(z))) break;
      z -= step;
    }
    roots[k] = z;
  }
  return roots;
}

// Labels the three roots so that, for real E > 0 in the semiclassical
// representation, i_zero is the purely imaginary root with positive
// imaginary part and i_plus / i_minus carry positive / negative real part.
inline TurningPointSet turning_points(const PotentialSpec& spec, cplx energy) {
  auto c = spec.v_coefficients();
  if (std::abs(c[3]) == 0.0)
    throw std::domain_error(
        "turning_points: cubic family required (degree-2 members are handled "
        "by the Stokes tracer directly)");
  auto roots = cubic_roots(c[3], c[2], c[1], c[0] - energy);

  TurningPointSet tp;
  tp.energy = energy;
  double scale = 1.0;
  for (auto r : roots) scale = std::max(scale, std::abs(r));
  double minsep = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      minsep = std::min(minsep, std::abs(roots[a] - roots[b]));
  tp.min_separation = minsep;
  tp.coalescent = minsep < 1e-9 * scale;

  // i_zero: largest imaginary part, ties broken toward the imaginary axis.
  int zi = 0;
  auto key = [&](int k) {
    return std::make_pair(roots[k].imag(), -std::abs(roots[k].real()));
  };
  for (int k = 1; k < 3; ++k)
    if (key(k) > key(zi)) zi = k;
  std::array<cplx, 2> rest;
  int n = 0;
  for (int k = 0; k < 3; ++k)
    if (k != zi) rest[n++] = roots[k];
  if (rest[0].real() > rest[1].real()) std::swap(rest[0], rest[1]);
  tp.i_zero = roots[zi];
  tp.i_minus = rest[0];
  tp.i_plus = rest[1];
  return tp;
}

// The unique real y > 0 with y^3 + y = E (E > 0): the height of the
// imaginary turning point I0 = i y.
inline double imag_turning_point(double energy) {
  if (!(energy > 0.0))
    throw std::domain_error("imag_turning_point: requires E > 0");
  double y = std::cbrt(energy);  // between the small-E and large-E limits
  for (int it = 0; it < 80; ++it) {
    double f = y * y * y + y - energy;
    double df = 3.0 * y * y + 1.0;
    double step = f / df;
    y -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, y)) break;
  }
  return y;
}

}  // namespace ptwell
