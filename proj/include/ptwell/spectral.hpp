#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ptwell/common.hpp"
#include "ptwell/model.hpp"
#include "ptwell/odeint.hpp"

namespace ptwell {

// --------------------------------------------------------------------------
// Scaled-Hermite Galerkin machinery. Basis functions are
//   chi_k(x) = sqrt(omega) e_k(omega x),
// with e_k the orthonormal Hermite functions, so x and p act by ladder
// operators and every member of the family assembles into an exactly banded
// complex symmetric matrix (bandwidth 3 from the cubic term).

struct GalerkinConfig {
  int basis_size = 64;   // N
  double scale = 1.0;    // omega
  PotentialSpec spec;
};

inline Eigen::MatrixXcd assemble(const GalerkinConfig& cfg) {
  const int n = cfg.basis_size;
  if (n < 1) throw std::domain_error("assemble: empty basis");
  const double w = cfg.scale;
  if (!(w > 0.0)) throw std::domain_error("assemble: scale must be positive");
  const auto c = cfg.spec.v_coefficients();
  const cplx kin = cfg.spec.kinetic();
  const double s2 = std::sqrt(2.0);

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    m(k, k) = kin * (w * w) * (k + 0.5) + c[2] / (w * w) * (k + 0.5) + c[0];
    if (k + 1 < n) {
      cplx v = c[1] / w * std::sqrt((k + 1) / 2.0) +
               c[3] / (w * w * w) * (3.0 * std::pow(k + 1.0, 1.5) / (2.0 * s2));
      m(k, k + 1) = v;
      m(k + 1, k) = v;
    }
    if (k + 2 < n) {
      cplx v = (-kin * (w * w) + c[2] / (w * w)) *
               (std::sqrt((k + 1.0) * (k + 2.0)) / 2.0);
      m(k, k + 2) = v;
      m(k + 2, k) = v;
    }
    if (k + 3 < n) {
      cplx v = c[3] / (w * w * w) *
               (std::sqrt((k + 1.0) * (k + 2.0) * (k + 3.0)) / (2.0 * s2));
      m(k, k + 3) = v;
      m(k + 3, k) = v;
    }
  }
  return m;
}

// Full dense nonsymmetric eigendecomposition. Eigenvectors come back with
// unit Euclidean norm and a fixed phase (largest component rotated onto the
// positive real axis) so repeated runs are bit-reproducible.
inline std::vector<std::pair<cplx, Eigen::VectorXcd>> eigen_decompose(
    const Eigen::MatrixXcd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, true);
  if (solver.info() != Eigen::Success)
    throw NoConvergence("eigen_decompose: QR iteration did not converge");
  const int n = static_cast<int>(a.rows());
  std::vector<std::pair<cplx, Eigen::VectorXcd>> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXcd v = solver.eigenvectors().col(k);
    v.normalize();
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    cplx piv = v(imax);
    if (std::abs(piv) > 0) v *= std::abs(piv) / piv;
    out.emplace_back(solver.eigenvalues()(k), std::move(v));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.first.real() != y.first.real())
      return x.first.real() < y.first.real();
    return x.first.imag() < y.first.imag();
  });
  return out;
}

// One converged level: energy, basis coefficients, and the basis-doubling
// stabilization estimate.
struct Eigenpair {
  cplx energy;
  Eigen::VectorXcd coefficients;
  cplx gauge_phase{1.0, 0.0};
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  bool near_degenerate = false;
};

struct SpectrumSlice {
  PotentialSpec spec;
  GalerkinConfig config;  // basis actually used for the returned vectors
  std::vector<Eigenpair> levels;  // ascending Re, ties by Im
};

// Hermitian overlap of two coefficient vectors, zero-padded to a common
// length. Both are assumed unit-normalized.
inline double overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const int n = static_cast<int>(std::min(a.size(), b.size()));
  cplx s = 0.0;
  for (int i = 0; i < n; ++i) s += std::conj(a(i)) * b(i);
  return std::abs(s);
}

inline double galerkin_base_scale(const PotentialSpec& spec) {
  switch (spec.representation) {
    case Representation::SemiclassicalH:
    case Representation::RotatedImagAxis: {
      double ah = std::abs(spec.parameter);
      double alpha_mag = std::pow(ah, -0.8);
      return std::pow(ah, -0.4) * std::pow(std::max(1.0, alpha_mag), 0.125);
    }
    case Representation::ScaledK:
      return std::pow(std::max(1.0, std::abs(spec.parameter)), 0.125);
    case Representation::PerturbativeB:
      return 1.0;
  }
  return 1.0;
}

namespace detail {

// Lowest `count` levels (by ascending Re) of one fixed-basis solve.
inline std::vector<std::pair<cplx, Eigen::VectorXcd>> lowest_levels(
    const GalerkinConfig& cfg, int count) {
  auto all = eigen_decompose(assemble(cfg));
  if (static_cast<int>(all.size()) > count) all.resize(count);
  return all;
}

struct StabilizedBatch {
  std::vector<Eigenpair> levels;  // coefficients in the 2N basis
  int fine_basis = 0;
  double worst_accuracy = std::numeric_limits<double>::infinity();
  bool complete = false;  // `count` levels passed the gate
};

// Solves at N and 2N, pairs levels by eigenvector overlap, and keeps the
// matched pairs only: truncation artifacts (spurious eigenvalues with huge
// imaginary parts but small real parts) have no stable partner across the
// doubling and drop out here.
inline StabilizedBatch doubling_pass(const PotentialSpec& spec, int n,
                                     double omega, int count, double gate) {
  GalerkinConfig coarse{n, omega, spec};
  GalerkinConfig fine{2 * n, omega, spec};
  auto a = lowest_levels(coarse, 2 * count + 12);
  auto b = lowest_levels(fine, 2 * (2 * count + 12));

  StabilizedBatch batch;
  batch.fine_basis = 2 * n;
  std::vector<Eigenpair> matched;
  std::vector<bool> used(b.size(), false);
  for (const auto& [ea, va] : a) {
    int best = -1;
    double best_ov = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      double ov = overlap(va, b[j].second);
      if (ov > best_ov) {
        best_ov = ov;
        best = static_cast<int>(j);
      }
    }
    if (best < 0 || best_ov < 0.5) continue;
    used[best] = true;
    Eigenpair pair;
    pair.energy = b[best].first;
    pair.coefficients = b[best].second;
    pair.accuracy = std::abs(ea - b[best].first);
    matched.push_back(std::move(pair));
  }
  std::sort(matched.begin(), matched.end(),
            [](const Eigenpair& x, const Eigenpair& y) {
              if (x.energy.real() != y.energy.real())
                return x.energy.real() < y.energy.real();
              return x.energy.imag() < y.energy.imag();
            });

  std::vector<Eigenpair> gated;
  for (auto& lv : matched)
    if (lv.accuracy <= gate * std::max(1.0, std::abs(lv.energy)))
      gated.push_back(lv);
  if (static_cast<int>(gated.size()) >= count) {
    gated.resize(count);
    batch.levels = std::move(gated);
    batch.complete = true;
  } else {
    if (static_cast<int>(matched.size()) > count) matched.resize(count);
    batch.levels = std::move(matched);
  }
  batch.worst_accuracy = batch.levels.empty()
                             ? std::numeric_limits<double>::infinity()
                             : 0.0;
  for (const auto& lv : batch.levels)
    batch.worst_accuracy = std::max(
        batch.worst_accuracy, lv.accuracy / std::max(1.0, std::abs(lv.energy)));
  if (static_cast<int>(batch.levels.size()) < count)
    batch.worst_accuracy = std::numeric_limits<double>::infinity();
  return batch;
}

inline int starting_basis(const PotentialSpec& spec, int count) {
  int n = std::max(48, 4 * count + 16);
  if (spec.representation == Representation::SemiclassicalH ||
      spec.representation == Representation::RotatedImagAxis) {
    double ah = std::abs(spec.parameter);
    if (ah < 1.0) n = std::max<int>(n, static_cast<int>(1.5 / ah));
  }
  return std::min(n, 512);
}

}  // namespace detail

struct StabilizeOptions {
  std::optional<GalerkinConfig> hint;
  int max_basis = 1024;          // cap on the fine (doubled) solve
  double gate = 1e-8;            // relative accuracy required per level
  bool tune_scale = true;
};

// The `count` lowest physical eigenpairs of the chosen operator, certified by
// the N -> 2N basis-doubling gate, with the basis width tuned by a grid
// search around the representation's natural scale.
inline SpectrumSlice stabilized_spectrum(const PotentialSpec& spec, int count,
                                         const StabilizeOptions& opts = {}) {
  if (count < 1) throw std::domain_error("stabilized_spectrum: count >= 1");
  if (spec.representation == Representation::SemiclassicalH &&
      !in_sector_c0(spec.parameter))
    throw std::domain_error("stabilized_spectrum: hbar outside sector C0");

  int n0 = opts.hint ? opts.hint->basis_size
                     : detail::starting_basis(spec, count);
  n0 = std::clamp(n0, 16, opts.max_basis / 2);

  double omega = opts.hint ? opts.hint->scale : 0.0;
  if (opts.tune_scale || omega <= 0.0) {
    const double base = omega > 0.0 ? omega : galerkin_base_scale(spec);
    static const double grid[] = {0.5, 0.75, 1.0, 1.5, 2.5};
    double best_acc = std::numeric_limits<double>::infinity();
    double best_omega = base;
    for (double g : grid) {
      auto batch = detail::doubling_pass(spec, n0, g * base, count, opts.gate);
      if (static_cast<int>(batch.levels.size()) < count) continue;
      double acc = batch.levels.back().accuracy /
                   std::max(1.0, std::abs(batch.levels.back().energy));
      if (acc < best_acc) {
        best_acc = acc;
        best_omega = g * base;
      }
    }
    omega = best_omega;
  }

  detail::StabilizedBatch batch;
  double best_worst = std::numeric_limits<double>::infinity();
  for (int n = n0; 2 * n <= opts.max_basis; n *= 2) {
    batch = detail::doubling_pass(spec, n, omega, count, opts.gate);
    if (batch.complete) {
      SpectrumSlice slice;
      slice.spec = spec;
      slice.config = GalerkinConfig{batch.fine_basis, omega, spec};
      slice.levels = std::move(batch.levels);
      // Flag near-degenerate pairs instead of deduplicating them.
      for (std::size_t i = 0; i < slice.levels.size(); ++i)
        for (std::size_t j = i + 1; j < slice.levels.size(); ++j)
          if (std::abs(slice.levels[i].energy - slice.levels[j].energy) <
              1e-6) {
            slice.levels[i].near_degenerate = true;
            slice.levels[j].near_degenerate = true;
          }
      return slice;
    }
    best_worst = std::min(best_worst, batch.worst_accuracy);
  }
  throw StabilizationFailure(
      "stabilized_spectrum: gate " + format_double(opts.gate) +
      " not met at basis cap; best relative accuracy " +
      format_double(best_worst));
}

// --------------------------------------------------------------------------
// Independent shooting oracle: integrate psi'' = (V - E)/kin psi inward from
// both decaying directions along the real axis and drive the Wronskian at the
// matching point to zero by a complex Newton iteration in E.

struct ShootingOptions {
  double x_right = 0.0;  // 0 = choose automatically from the decay budget
  double x_left = 0.0;
  double match_point = 0.0;
  double budget = 30.0;  // target integral of the decay exponent
  double newton_tol = 1e-11;
  int max_newton = 50;
  double ode_tol = 1e-12;
};

namespace detail {

inline double decay_endpoint(const PotentialSpec& spec, cplx energy,
                             double direction, double budget) {
  const cplx kin = spec.kinetic();
  double x = direction * 1.0;
  double acc = 0.0;
  const double step = 0.05;
  for (int i = 0; i < 4000; ++i) {
    cplx q = (spec.potential(x) - energy) / kin;
    double rate = std::sqrt(q).real();
    if (rate > 0.0) acc += rate * step;
    if (acc >= budget) return x;
    x += direction * step;
  }
  if (acc < budget / 2.0)
    throw InitializationTooShallow(
        "shooting: decay budget unreachable along the real axis");
  return x;
}

struct ShotResult {
  cplx psi, dpsi;
  double log_scale;
};

template <typename QFun>
ShotResult shoot_inward(QFun&& q, const PotentialSpec& spec, cplx energy,
                        double from, double to, double ode_tol) {
  const cplx kin = spec.kinetic();
  cplx q0 = (spec.potential(from) - energy) / kin;
  cplx dq0 = spec.potential_derivative(from) / kin;
  cplx root = std::sqrt(q0);
  if (root.real() < 0) root = -root;
  // Leading WKB: the solution decaying outward, carried inward where it
  // grows and therefore dominates whatever error the initialization made.
  double sign = from > to ? -1.0 : 1.0;
  PsiState y;
  y.psi = 1.0;
  y.dpsi = sign * root - dq0 / (4.0 * q0);
  y.log_scale = 0.0;
  return [&] {
    PsiState r = integrate_schrodinger(q, cplx(from), cplx(to), y, ode_tol);
    return ShotResult{r.psi, r.dpsi, r.log_scale};
  }();
}

}  // namespace detail

inline cplx shooting_eigenvalue(const PotentialSpec& spec, cplx guess,
                                const ShootingOptions& opts = {}) {
  if (spec.kinetic().imag() != 0.0 || spec.kinetic().real() <= 0.0)
    throw std::domain_error("shooting_eigenvalue: validated for real hbar");

  const double xr = opts.x_right > 0.0
                        ? opts.x_right
                        : detail::decay_endpoint(spec, guess, +1.0, opts.budget);
  const double xl = opts.x_left != 0.0
                        ? opts.x_left
                        : detail::decay_endpoint(spec, guess, -1.0, opts.budget);
  const double xm = opts.match_point;
  const cplx kin = spec.kinetic();

  auto wronskian = [&](cplx energy) -> cplx {
    auto q = [&](cplx z) { return (spec.potential(z) - energy) / kin; };
    auto right = detail::shoot_inward(q, spec, energy, xr, xm, opts.ode_tol);
    auto left = detail::shoot_inward(q, spec, energy, xl, xm, opts.ode_tol);
    cplx w = left.psi * right.dpsi - left.dpsi * right.psi;
    double norm = (std::abs(left.psi) + std::abs(left.dpsi)) *
                      (std::abs(right.psi) + std::abs(right.dpsi)) +
                  1e-300;
    return w / norm;
  };

  cplx e = guess;
  for (int it = 0; it < opts.max_newton; ++it) {
    cplx w = wronskian(e);
    double delta = 1e-7 * std::max(1.0, std::abs(e));
    cplx dw = (wronskian(e + delta) - w) / delta;
    if (std::abs(dw) == 0.0)
      throw NoConvergence("shooting_eigenvalue: flat Wronskian");
    cplx step = w / dw;
    e -= step;
    if (std::abs(step) < opts.newton_tol * std::max(1.0, std::abs(e)))
      return e;
  }
  throw NoConvergence("shooting_eigenvalue: Newton budget exhausted after " +
                      std::to_string(opts.max_newton) + " steps");
}

}  // namespace ptwell
