#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptwell/common.hpp"
#include "ptwell/model.hpp"
#include "ptwell/odeint.hpp"
#include "ptwell/quad.hpp"
#include "ptwell/spectral.hpp"
#include "ptwell/wkb.hpp"

namespace ptwell {

enum class Gauge { Raw, RealOnImagAxis };

// An eigenfunction extended to the complex plane: basis sum inside the trust
// region, continued by the Schrodinger equation outside it.
struct EntireState {
  GalerkinConfig config;  // carries the PotentialSpec
  Eigenpair pair;
  Gauge gauge = Gauge::Raw;
  double trust_radius = 0.0;

  const PotentialSpec& spec() const { return config.spec; }
  cplx energy() const { return pair.energy; }
};

// Builds the state, applying the real-on-the-imaginary-axis gauge whenever
// the level is real: e_k(i u) = i^k (real), so the gauge rotates all
// d_k = c_k i^k onto the real axis.
inline EntireState make_entire_state(const SpectrumSlice& slice, int index,
                                     std::optional<Gauge> want = std::nullopt) {
  if (index < 0 || index >= static_cast<int>(slice.levels.size()))
    throw std::out_of_range("make_entire_state: level index");
  EntireState st;
  st.config = slice.config;
  st.pair = slice.levels[index];
  st.trust_radius =
      0.8 * std::sqrt(2.0 * st.config.basis_size) / st.config.scale;

  const bool is_real = std::abs(st.pair.energy.imag()) < 1e-8;
  Gauge target = want.value_or(is_real ? Gauge::RealOnImagAxis : Gauge::Raw);
  if (target == Gauge::RealOnImagAxis) {
    if (!is_real)
      throw std::domain_error(
          "real-on-imaginary-axis gauge needs a real level");
    cplx s = 0.0;
    const int n = static_cast<int>(st.pair.coefficients.size());
    for (int k = 0; k < n; ++k) {
      cplx d = st.pair.coefficients(k) * std::pow(iu, k);
      s += d * d;
    }
    double theta = -0.5 * std::arg(s);
    cplx phase = std::polar(1.0, theta);
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < n; ++k) {
      cplx d = phase * st.pair.coefficients(k) * std::pow(iu, k);
      worst = std::max(worst, std::abs(d.imag()));
      scale = std::max(scale, std::abs(d));
    }
    if (worst > 1e-6 * scale)
      throw std::domain_error(
          "real-on-imaginary-axis gauge not attainable for this level");
    // The truncated operator commutes with PxT exactly, so the residual
    // imaginary parts of d_k are eigensolver noise: project them away. The
    // resulting coefficients make psi(iy) real and psi PxT-symmetric to
    // rounding.
    for (int k = 0; k < n; ++k) {
      cplx d = phase * st.pair.coefficients(k) * std::pow(iu, k);
      st.pair.coefficients(k) = d.real() * std::pow(-iu, k);
    }
    st.pair.coefficients.normalize();
    st.pair.gauge_phase = phase;
    st.gauge = Gauge::RealOnImagAxis;
  }
  return st;
}

// --------------------------------------------------------------------------
// Evaluation. Values carry a log-magnitude prefactor so growth regions never
// overflow: actual = value * exp(log_scale).

struct EvalResult {
  cplx value{0.0};
  cplx derivative{0.0};
  double log_scale = 0.0;
  double local_scale = 0.0;  // largest single basis term (same prefactor)
  bool via_ode = false;

  cplx value_plain() const { return value * std::exp(log_scale); }
  cplx derivative_plain() const { return derivative * std::exp(log_scale); }
};

namespace detail {

inline EvalResult hermite_sum(const EntireState& st, cplx z) {
  const int n = static_cast<int>(st.pair.coefficients.size());
  const double w = st.config.scale;
  const cplx zeta = w * z;

  EvalResult r;
  // Split the Gaussian magnitude off into the log prefactor.
  r.log_scale = -0.5 * (zeta * zeta).real();
  cplx t_prev = 0.0;
  cplx t = std::pow(pi, -0.25) *
           std::exp(cplx(0.0, -0.5 * (zeta * zeta).imag()));
  cplx sum = 0.0, dsum = 0.0;
  double local = 0.0;
  double renorm = 0.0;
  for (int k = 0; k < n; ++k) {
    cplx ck = st.pair.coefficients(k);
    cplx term = ck * t;
    sum += term;
    // e_k'(zeta) = -zeta e_k + sqrt(2k) e_{k-1}
    dsum += ck * (-zeta * t + std::sqrt(2.0 * k) * t_prev);
    local = std::max(local, std::abs(term));
    cplx t_next = std::sqrt(2.0 / (k + 1.0)) * zeta * t -
                  std::sqrt(k / (k + 1.0)) * t_prev;
    t_prev = t;
    t = t_next;
    double mag = std::max(std::abs(t), std::abs(t_prev));
    if (mag > 1e120) {
      // Rescale the recurrence and everything accumulated so far.
      t /= mag;
      t_prev /= mag;
      sum /= mag;
      dsum /= mag;
      local /= mag;
      renorm += std::log(mag);
    }
  }
  r.value = std::sqrt(w) * sum;
  r.derivative = w * std::sqrt(w) * dsum;
  r.local_scale = std::sqrt(w) * local;
  r.log_scale += renorm;
  return r;
}

}  // namespace detail

namespace detail {

// The basis sum is trustworthy while the result stays clear of the
// cancellation floor set by the largest individual term.
inline bool sum_reliable(const EvalResult& r) {
  double floor = 5e-14 * r.local_scale;
  return std::max(std::abs(r.value), std::abs(r.derivative)) > floor;
}

}  // namespace detail

// Evaluates psi (and psi') at z. Basis sum inside the trust region; outside
// it, or wherever cancellation erodes the sum, the value is carried by
// integrating the Schrodinger equation from the nearest reliable anchor on
// the ray through z.
inline EvalResult evaluate(const EntireState& st, cplx z) {
  const double R = st.trust_radius;
  EvalResult direct;
  bool have_direct = false;
  if (std::abs(z) <= R) {
    direct = detail::hermite_sum(st, z);
    if (detail::sum_reliable(direct)) return direct;
    have_direct = true;
  }

  // Walk toward the origin until the basis sum is clean, then continue back.
  cplx anchor = z;
  EvalResult base;
  bool found = false;
  for (double t : {0.9, 0.8, 0.65, 0.5, 0.35, 0.2, 0.1, 0.0}) {
    cplx za = t * z;
    if (std::abs(za) > R) continue;
    base = detail::hermite_sum(st, za);
    if (detail::sum_reliable(base)) {
      anchor = za;
      found = true;
      break;
    }
  }
  if (!found) {
    if (have_direct) return direct;  // nothing better available
    throw OverflowRegime("evaluate: no reliable anchor toward the origin");
  }

  PsiState y0{base.value, base.derivative, base.log_scale};
  const cplx kin = st.spec().kinetic();
  const cplx energy = st.pair.energy;
  const auto& spec = st.spec();
  auto q = [&](cplx zz) { return (spec.potential(zz) - energy) / kin; };
  PsiState out = integrate_schrodinger(q, anchor, z, y0, 1e-12);
  EvalResult r;
  r.value = out.psi;
  r.derivative = out.dpsi;
  r.log_scale = out.log_scale;
  r.local_scale = std::max(std::abs(out.psi), std::abs(out.dpsi));
  r.via_ode = true;
  return r;
}

// --------------------------------------------------------------------------
// Regions of the plane used by the confinement statements.

enum class RegionTag { C_sigma, C_B, ImaginaryAxis, C_plus_half, C_minus_half, Other };

inline RegionTag classify_region(cplx z, double axis_tol = 1e-6) {
  const double x = z.real(), y = z.imag();
  if (std::abs(x) <= axis_tol) return RegionTag::ImaginaryAxis;
  if (y < 0.0 && std::abs(x) < -std::sqrt(3.0) * y) return RegionTag::C_sigma;
  if (y > 0.0 && std::abs(x) < std::sqrt(3.0) * y) return RegionTag::C_B;
  if (x > 0.0) return RegionTag::C_plus_half;
  if (x < 0.0) return RegionTag::C_minus_half;
  return RegionTag::Other;
}

inline const char* region_name(RegionTag t) {
  switch (t) {
    case RegionTag::C_sigma: return "C_sigma";
    case RegionTag::C_B: return "C_B";
    case RegionTag::ImaginaryAxis: return "imaginary_axis";
    case RegionTag::C_plus_half: return "C_plus_half";
    case RegionTag::C_minus_half: return "C_minus_half";
    case RegionTag::Other: return "other";
  }
  return "?";
}

// --------------------------------------------------------------------------
// Argument-principle zero search on rectangles with quadtree subdivision.

struct Rect {
  double re_lo, re_hi, im_lo, im_hi;
  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
  double diag() const { return std::hypot(width(), height()); }
  bool contains(cplx z, double eps = 0.0) const {
    return z.real() >= re_lo - eps && z.real() <= re_hi + eps &&
           z.imag() >= im_lo - eps && z.imag() <= im_hi + eps;
  }
  Rect inflated(double f) const {
    double dx = f * std::max(width(), 0.2), dy = f * std::max(height(), 0.2);
    return {re_lo - dx, re_hi + dx, im_lo - dy, im_hi + dy};
  }
};

enum class ZeroKind { Function, Derivative };

namespace detail {

struct FieldFun {
  const EntireState* st;
  ZeroKind kind;

  // (f, f') with a common log prefactor; f = psi or psi'.
  std::pair<cplx, cplx> operator()(cplx z) const {
    EvalResult r = evaluate(*st, z);
    if (kind == ZeroKind::Function) return {r.value, r.derivative};
    cplx q = (st->spec().potential(z) - st->pair.energy) / st->spec().kinetic();
    return {r.derivative, q * r.value};
  }
  double floor_scale(cplx z) const {
    EvalResult r = evaluate(*st, z);
    double base = std::max(r.local_scale,
                           std::max(std::abs(r.value), std::abs(r.derivative)));
    return base;
  }
};

struct BoundarySample {
  cplx z, f;
  double rate;  // |f'/f|, a hard bound on the phase rotation per arclength
};

// Total argument change of f along the segment [a, b]. Since
// |d arg f / ds| <= |f'/f| for analytic f, a hop is trustworthy once its
// length times the local rotation rate stays below a safe fraction of pi.
inline double arg_change(const FieldFun& f, const BoundarySample& a,
                         const BoundarySample& b, int depth = 0) {
  double d = std::remainder(std::arg(b.f) - std::arg(a.f), 2.0 * pi);
  double span = std::abs(b.z - a.z);
  double budget = span * std::max(a.rate, b.rate);
  if ((std::abs(d) < pi / 2.0 && budget < 1.2 && depth >= 1) || depth > 42)
    return d;
  cplx zm = 0.5 * (a.z + b.z);
  auto [fm, dfm] = f(zm);
  if (std::abs(fm) == 0.0) throw BoundaryZero("zero on the search boundary");
  BoundarySample m{zm, fm, std::abs(dfm / fm)};
  return arg_change(f, a, m, depth + 1) + arg_change(f, m, b, depth + 1);
}

inline int winding_number(const FieldFun& f, const Rect& r) {
  const cplx corners[5] = {{r.re_lo, r.im_lo},
                           {r.re_hi, r.im_lo},
                           {r.re_hi, r.im_hi},
                           {r.re_lo, r.im_hi},
                           {r.re_lo, r.im_lo}};
  BoundarySample s[5];
  for (int k = 0; k < 4; ++k) {
    auto [fv, dfv] = f(corners[k]);
    if (std::abs(fv) == 0.0)
      throw BoundaryZero("zero on a search-rectangle corner");
    s[k] = {corners[k], fv, std::abs(dfv / fv)};
  }
  s[4] = s[0];
  double total = 0.0;
  for (int k = 0; k < 4; ++k) total += arg_change(f, s[k], s[k + 1]);
  double w = total / (2.0 * pi);
  long rounded = std::lround(w);
  if (std::abs(w - double(rounded)) > 1e-3)
    throw BoundaryZero("non-integer winding: zero too close to the boundary");
  if (rounded < 0)
    throw CountMismatch("negative winding: phase tracking failed");
  return static_cast<int>(rounded);
}

inline int winding_with_nudge(const FieldFun& f, Rect& r, int tries = 5) {
  for (int t = 0; t < tries; ++t) {
    try {
      return winding_number(f, r);
    } catch (const BoundaryZero&) {
      r = r.inflated(1e-3 * (t + 1));
    }
  }
  throw BoundaryZero("winding_with_nudge: nudging failed 5 times");
}

inline bool newton_polish(const FieldFun& f, cplx seed, const Rect& r,
                          cplx& root) {
  cplx z = seed;
  const double scale = std::max(1.0, std::abs(seed));
  for (int it = 0; it < 80; ++it) {
    auto [fv, dfv] = f(z);
    if (std::abs(dfv) == 0.0) return false;
    cplx step = fv / dfv;
    z -= step;
    if (!std::isfinite(std::abs(z))) return false;
    if (std::abs(step) < 1e-13 * scale) {
      if (!r.contains(z, 1e-9 * (1.0 + r.diag()))) return false;
      root = z;
      return true;
    }
  }
  return false;
}

inline void quadtree_zeros(const FieldFun& f, Rect r, int expected, int depth,
                           std::vector<cplx>& out) {
  if (expected == 0) return;
  if (depth > 46)
    throw CountMismatch("quadtree: depth cap with zeros unresolved");
  if (expected == 1) {
    cplx seed{0.5 * (r.re_lo + r.re_hi), 0.5 * (r.im_lo + r.im_hi)};
    cplx root;
    if (newton_polish(f, seed, r, root)) {
      out.push_back(root);
      return;
    }
  }
  // Split along the longer edge first; nudge the split line off zeros.
  for (double shift : {0.0, 7e-3, -9e-3, 1.7e-2, -2.3e-2}) {
    double fx = 0.5 + shift, fy = 0.5 - shift;
    double xm = r.re_lo + fx * r.width();
    double ym = r.im_lo + fy * r.height();
    Rect q[4] = {{r.re_lo, xm, r.im_lo, ym},
                 {xm, r.re_hi, r.im_lo, ym},
                 {r.re_lo, xm, ym, r.im_hi},
                 {xm, r.re_hi, ym, r.im_hi}};
    int w[4];
    bool ok = true;
    int sum = 0;
    try {
      for (int k = 0; k < 4; ++k) {
        w[k] = winding_number(f, q[k]);
        sum += w[k];
      }
    } catch (const BoundaryZero&) {
      ok = false;
    }
    if (!ok || sum != expected) continue;
    for (int k = 0; k < 4; ++k)
      if (w[k] > 0) quadtree_zeros(f, q[k], w[k], depth + 1, out);
    return;
  }
  throw CountMismatch("quadtree: could not split a cell cleanly");
}

}  // namespace detail

// All zeros of psi (or psi') inside the rectangle, by winding counts and
// quadtree subdivision, each polished by Newton to ~1e-13. Exact integer
// counts: a CountMismatch is thrown rather than returning a partial list.
inline std::vector<cplx> zeros_in_rect(const EntireState& st, Rect rect,
                                       ZeroKind what = ZeroKind::Function) {
  detail::FieldFun f{&st, what};
  Rect r = rect;
  int w = detail::winding_with_nudge(f, r);
  std::vector<cplx> out;
  detail::quadtree_zeros(f, r, w, 0, out);
  if (static_cast<int>(out.size()) != w)
    throw CountMismatch("zeros_in_rect: polished roots != winding count");
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

// --------------------------------------------------------------------------
// Zero catalog: nodes vs board zeros, antinodes vs stationary points, and
// the ordered symbol sequence along the string.

struct CatalogEntry {
  cplx position;
  std::string symbol;  // e.g. "N_-2", "A_0"
  double along_string = 0.0;
};

struct ZeroCatalog {
  std::vector<cplx> nodes;
  std::vector<cplx> board_zeros;
  std::vector<cplx> antinodes;
  std::vector<cplx> stationary_points;
  std::vector<cplx> others;  // genuine zeros away from the monochord
  std::vector<cplx> ambiguous;
  Rect search_region{0, 0, 0, 0};
  std::vector<CatalogEntry> sequence;
  int imaginary_node_count = 0;
  int imaginary_antinode_count = 0;
  double max_node_string_distance = 0.0;
};

namespace detail {

inline double polyline_distance_and_arc(const std::vector<cplx>& line, cplx z,
                                        double* arc_out) {
  double best = std::numeric_limits<double>::infinity();
  double arc = 0.0, best_arc = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    cplx a = line[i - 1], b = line[i];
    cplx d = b - a;
    double len = std::abs(d);
    double t = len > 0 ? std::clamp(((z - a) * std::conj(d)).real() /
                                        (len * len),
                                    0.0, 1.0)
                       : 0.0;
    double dist = std::abs(z - (a + t * d));
    if (dist < best) {
      best = dist;
      best_arc = arc + t * len;
    }
    arc += len;
  }
  if (arc_out) *arc_out = best_arc;
  return best;
}

}  // namespace detail

inline std::vector<double> axis_zeros(const EntireState& st, double y_lo,
                                      double y_hi, ZeroKind what,
                                      int samples = 600);

// Classifies all zeros of psi and psi' found in `rect` (auto-sized from the
// turning points when absent) against the traced monochord at the state's
// energy, and assembles the node/antinode sequence.
inline ZeroCatalog classify_catalog(const EntireState& st,
                                    std::optional<Rect> rect = std::nullopt,
                                    double board_span = 0.8) {
  const cplx energy = st.pair.energy;
  const bool harmonic = st.spec().is_harmonic();

  auto stokes = trace_stokes(st.spec(), energy, cplx(0.0),
                             ResumMode::Classical);
  const std::vector<cplx>* string_line =
      stokes.string_line ? &*stokes.string_line : nullptr;
  const std::vector<cplx>* board_line =
      stokes.board_line ? &*stokes.board_line : nullptr;

  ZeroCatalog cat;
  std::vector<cplx> zeros, stat;
  if (rect) {
    cat.search_region = *rect;
    zeros = zeros_in_rect(st, *rect, ZeroKind::Function);
    stat = zeros_in_rect(st, *rect, ZeroKind::Derivative);
  } else {
    // Auto-sizing: a belt hugging the string (where the nodes and antinodes
    // live) plus the axis segment [-Y, ytilde + span] covering the board
    // continuation and the first board zeros. Deep off-string regions hold
    // no zeros and are numerically hostile, so they are not searched.
    Rect belt{-1.0, 1.0, -0.8, 0.3};
    if (string_line) {
      double re_lo = 1e300, re_hi = -1e300, im_lo = 1e300, im_hi = -1e300;
      for (cplx z : *string_line) {
        re_lo = std::min(re_lo, z.real());
        re_hi = std::max(re_hi, z.real());
        im_lo = std::min(im_lo, z.imag());
        im_hi = std::max(im_hi, z.imag());
      }
      belt = Rect{re_lo - 0.45, re_hi + 0.45, im_lo - 0.45, im_hi + 0.45};
    } else {
      double re_span = 1.0, im_lo = -0.8, im_hi = 0.3;
      for (cplx t : stokes.turning_points) {
        re_span = std::max(re_span, std::abs(t.real()) + 0.6);
        im_lo = std::min(im_lo, t.imag() - 0.6);
        im_hi = std::max(im_hi, t.imag() + 0.4);
      }
      belt = Rect{-re_span, re_span, im_lo, im_hi};
    }
    zeros = zeros_in_rect(st, belt, ZeroKind::Function);
    stat = zeros_in_rect(st, belt, ZeroKind::Derivative);

    double axis_lo = -3.0;  // board continuation depth
    double axis_hi = belt.im_hi;
    if (stokes.idx_zero >= 0)
      axis_hi = stokes.turning_points[stokes.idx_zero].imag() + board_span;
    if (!harmonic && st.gauge == Gauge::RealOnImagAxis) {
      auto merge = [](std::vector<cplx>& into, double y) {
        cplx z{0.0, y};
        for (cplx w : into)
          if (std::abs(w - z) < 1e-7) return;
        into.push_back(z);
      };
      for (double y : axis_zeros(st, axis_lo, axis_hi, ZeroKind::Function))
        merge(zeros, y);
      for (double y : axis_zeros(st, axis_lo, axis_hi, ZeroKind::Derivative))
        merge(stat, y);
    }
    cat.search_region = Rect{belt.re_lo, belt.re_hi,
                             std::min(belt.im_lo, axis_lo),
                             std::max(belt.im_hi, axis_hi)};
  }

  double ytilde = std::numeric_limits<double>::infinity();
  if (stokes.idx_zero >= 0)
    ytilde = stokes.turning_points[stokes.idx_zero].imag();

  const double axis_tol = 1e-6;
  const double both_tol = 1e-3;

  auto classify_on_board = [&](cplx z, double* d_string) -> bool {
    double ds = std::numeric_limits<double>::infinity();
    double db = std::numeric_limits<double>::infinity();
    if (string_line)
      ds = detail::polyline_distance_and_arc(*string_line, z, nullptr);
    if (board_line)
      db = detail::polyline_distance_and_arc(*board_line, z, nullptr);
    if (d_string) *d_string = ds;
    if (ds < both_tol && db < both_tol) {
      cat.ambiguous.push_back(z);
    }
    if (std::abs(z.real()) <= axis_tol && z.imag() > ytilde + 1e-9)
      return true;  // on the board half-line above I0
    return db < ds;
  };

  for (cplx z : zeros) {
    double ds = 0.0;
    if (!harmonic && classify_on_board(z, &ds)) {
      cat.board_zeros.push_back(z);
    } else {
      cat.nodes.push_back(z);
      cat.max_node_string_distance =
          std::max(cat.max_node_string_distance, ds);
      if (std::abs(z.real()) <= axis_tol) ++cat.imaginary_node_count;
    }
  }
  for (cplx z : stat) {
    if (!harmonic && classify_on_board(z, nullptr)) {
      cat.stationary_points.push_back(z);
    } else {
      cat.antinodes.push_back(z);
      if (std::abs(z.real()) <= axis_tol) ++cat.imaginary_antinode_count;
    }
  }

  // Sequence along the string: order nodes and antinodes by arclength (or by
  // the real axis for the harmonic member) and index them symmetrically
  // around the imaginary axis.
  struct Item {
    cplx z;
    bool node;
    double s;
  };
  std::vector<Item> items;
  for (cplx z : cat.nodes) {
    double s = z.real();
    if (string_line)
      detail::polyline_distance_and_arc(*string_line, z, &s);
    items.push_back({z, true, s});
  }
  for (cplx z : cat.antinodes) {
    double s = z.real();
    if (string_line)
      detail::polyline_distance_and_arc(*string_line, z, &s);
    items.push_back({z, false, s});
  }
  // Ensure arclength increases with Re z (the tracer may run right-to-left).
  if (string_line && items.size() > 1) {
    double cov = 0.0;
    for (const auto& it : items) cov += it.s * it.z.real();
    if (cov < 0.0)
      for (auto& it : items) it.s = -it.s;
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.s < b.s; });

  auto index_symbols = [&](bool nodes_pass) {
    std::vector<const Item*> sel;
    for (const auto& it : items)
      if (it.node == nodes_pass) sel.push_back(&it);
    std::map<const Item*, int> idx;
    if (harmonic) {
      int k = 1;
      for (auto* it : sel) idx[it] = k++;
    } else {
      int center = -1;
      for (std::size_t i = 0; i < sel.size(); ++i)
        if (std::abs(sel[i]->z.real()) <= axis_tol)
          center = static_cast<int>(i);
      for (std::size_t i = 0; i < sel.size(); ++i) {
        if (center >= 0) {
          idx[sel[i]] = static_cast<int>(i) - center;
        } else {
          // No central element: negative indices left of the axis,
          // positive to the right.
          int neg = 0;
          for (auto* it : sel)
            if (it->z.real() < -axis_tol) ++neg;
          int j = static_cast<int>(i);
          idx[sel[i]] = j < neg ? j - neg : j - neg + 1;
        }
      }
    }
    return idx;
  };
  auto node_idx = index_symbols(true);
  auto anti_idx = index_symbols(false);
  for (const auto& it : items) {
    CatalogEntry e;
    e.position = it.z;
    e.along_string = it.s;
    int k = it.node ? node_idx[&it] : anti_idx[&it];
    e.symbol = (it.node ? std::string("N_") : std::string("A_")) +
               std::to_string(k);
    cat.sequence.push_back(e);
  }
  return cat;
}

// --------------------------------------------------------------------------
// Parity integral int_R psi^2 dx under unit L2 normalization.

inline cplx parity_integral(const EntireState& st, double* norm_out = nullptr) {
  // Pick the window from the decay of the state along the real axis.
  auto mag = [&](double x) {
    EvalResult r = evaluate(st, cplx(x));
    return std::log(std::abs(r.value) + 1e-300) + r.log_scale;
  };
  double peak = mag(0.0);
  double xr = 1.0, xl = -1.0;
  for (int i = 0; i < 200 && mag(xr) > peak - 40.0; ++i) xr += 0.5;
  for (int i = 0; i < 200 && mag(xl) > peak - 40.0; ++i) xl -= 0.5;

  auto psi2 = [&](double x) {
    EvalResult r = evaluate(st, cplx(x));
    cplx v = r.value * std::exp(r.log_scale - peak);
    return v * v;
  };
  auto abs2 = [&](double x) {
    EvalResult r = evaluate(st, cplx(x));
    double m = std::abs(r.value) * std::exp(r.log_scale - peak);
    return cplx(m * m, 0.0);
  };
  cplx p = integrate_adaptive(psi2, xl, xr, 1e-12);
  cplx n = integrate_adaptive(abs2, xl, xr, 1e-12);
  if (norm_out) *norm_out = n.real() * std::exp(2.0 * peak);
  return p / n.real();
}

// --------------------------------------------------------------------------
// Flux diagnostics (the Loeffel-Martin machinery). `current` is
// Im(kin conj(psi) dpsi) along the line; `comparison` is the confinement
// integral it must track.

struct FluxProfile {
  std::vector<double> parameter;
  std::vector<double> current;
  std::vector<double> comparison;
};

// Along the vertical line Re z = x (x = 0 is the imaginary-axis variant):
// comparison(y) = -int_y^{y_hi} Im(V - E)(x + is) |psi|^2 ds.
inline FluxProfile flux_diagnostic_vertical(const EntireState& st, double x,
                                            double y_lo, double y_hi,
                                            int samples = 60,
                                            double y_tail = 0.0) {
  const cplx kin = st.spec().kinetic();
  if (kin.imag() != 0.0)
    throw std::domain_error("flux diagnostics assume a real kinetic factor");
  double top = y_tail > 0.0 ? y_tail : y_hi;
  // Common magnitude reference to keep everything in range.
  double ref = 0.0;
  for (int k = 0; k <= samples; ++k) {
    double y = y_lo + (y_hi - y_lo) * k / samples;
    EvalResult r = evaluate(st, cplx(x, y));
    ref = std::max(ref, std::log(std::abs(r.value) + 1e-300) + r.log_scale);
  }
  FluxProfile fp;
  auto dens = [&](double s) {
    EvalResult r = evaluate(st, cplx(x, s));
    double m = std::abs(r.value) * std::exp(r.log_scale - ref);
    double imv = (st.spec().potential(cplx(x, s)) - st.pair.energy).imag();
    return cplx(imv * m * m, 0.0);
  };
  for (int k = 0; k <= samples; ++k) {
    double y = y_lo + (y_hi - y_lo) * k / samples;
    EvalResult r = evaluate(st, cplx(x, y));
    double sc = std::exp(r.log_scale - ref);
    // d/dy psi(x + iy) = i psi'
    cplx cur = kin * std::conj(r.value * sc) * (iu * r.derivative * sc);
    fp.parameter.push_back(y);
    fp.current.push_back(cur.imag());
    fp.comparison.push_back(
        -integrate_adaptive(dens, y, top, 1e-11).real());
  }
  return fp;
}

// Along the horizontal line Im z = y:
// current(x) = Im(kin conj(psi) psi'), comparison(x) = -int_x^{x_hi} ...
inline FluxProfile flux_diagnostic_horizontal(const EntireState& st, double y,
                                              double x_lo, double x_hi,
                                              int samples = 60) {
  const cplx kin = st.spec().kinetic();
  double ref = 0.0;
  for (int k = 0; k <= samples; ++k) {
    double x = x_lo + (x_hi - x_lo) * k / samples;
    EvalResult r = evaluate(st, cplx(x, y));
    ref = std::max(ref, std::log(std::abs(r.value) + 1e-300) + r.log_scale);
  }
  FluxProfile fp;
  auto dens = [&](double s) {
    EvalResult r = evaluate(st, cplx(s, y));
    double m = std::abs(r.value) * std::exp(r.log_scale - ref);
    double imv = (st.spec().potential(cplx(s, y)) - st.pair.energy).imag();
    return cplx(imv * m * m, 0.0);
  };
  for (int k = 0; k <= samples; ++k) {
    double x = x_lo + (x_hi - x_lo) * k / samples;
    EvalResult r = evaluate(st, cplx(x, y));
    double sc = std::exp(r.log_scale - ref);
    cplx cur = kin * std::conj(r.value * sc) * (r.derivative * sc);
    fp.parameter.push_back(x);
    fp.current.push_back(cur.imag());
    fp.comparison.push_back(
        -integrate_adaptive(dens, x, x_hi + 6.0, 1e-11).real());
  }
  return fp;
}

// --------------------------------------------------------------------------
// Scans of phi(y) = psi(iy) along the imaginary axis. Deep on the board
// continuation the basis sum drowns in cancellation, so the scan marches a
// single continued integration away from a reliable anchor and samples as it
// goes. With the real-on-imaginary-axis gauge phi is real.

struct AxisScan {
  std::vector<double> ys;
  std::vector<PsiState> states;  // psi, psi' at iy (d/dy psi(iy) = i psi')
  const EntireState* state = nullptr;

  double phi(std::size_t k) const { return states[k].psi.real(); }
  double dphi(std::size_t k) const { return (iu * states[k].dpsi).real(); }

  // Re-evaluates at arbitrary y by integrating from the nearest sample.
  PsiState at(double y) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < ys.size(); ++k)
      if (std::abs(ys[k] - y) < std::abs(ys[best] - y)) best = k;
    const auto& spec = state->spec();
    cplx energy = state->pair.energy;
    cplx kin = spec.kinetic();
    auto q = [&](cplx zz) { return (spec.potential(zz) - energy) / kin; };
    return integrate_schrodinger(q, iu * ys[best], iu * y, states[best],
                                 1e-12);
  }
};

inline AxisScan axis_scan(const EntireState& st, double y_lo, double y_hi,
                          int samples = 600) {
  if (!(y_hi > y_lo)) throw std::domain_error("axis_scan: empty window");
  AxisScan scan;
  scan.state = &st;
  scan.ys.resize(samples + 1);
  scan.states.resize(samples + 1);
  for (int k = 0; k <= samples; ++k)
    scan.ys[k] = y_lo + (y_hi - y_lo) * k / samples;

  const auto& spec = st.spec();
  const cplx energy = st.pair.energy;
  const cplx kin = spec.kinetic();
  auto q = [&](cplx zz) { return (spec.potential(zz) - energy) / kin; };

  // Anchor at the sample nearest the origin, then march both ways.
  int ka = 0;
  for (int k = 1; k <= samples; ++k)
    if (std::abs(scan.ys[k]) < std::abs(scan.ys[ka])) ka = k;
  EvalResult base = evaluate(st, iu * scan.ys[ka]);
  scan.states[ka] = PsiState{base.value, base.derivative, base.log_scale};
  for (int k = ka + 1; k <= samples; ++k)
    scan.states[k] = integrate_schrodinger(
        q, iu * scan.ys[k - 1], iu * scan.ys[k], scan.states[k - 1], 1e-12);
  for (int k = ka - 1; k >= 0; --k)
    scan.states[k] = integrate_schrodinger(
        q, iu * scan.ys[k + 1], iu * scan.ys[k], scan.states[k + 1], 1e-12);
  return scan;
}

// Zeros of phi (nodes/board zeros) or of phi' (antinodes/stationary points)
// on the axis window, from sign changes of the scan polished by bisection.
inline std::vector<double> axis_zeros(const EntireState& st, double y_lo,
                                      double y_hi, ZeroKind what,
                                      int samples) {
  AxisScan scan = axis_scan(st, y_lo, y_hi, samples);
  auto g = [&](const PsiState& s) {
    return what == ZeroKind::Function ? s.psi.real()
                                      : (iu * s.dpsi).real();
  };
  std::vector<double> roots;
  for (std::size_t k = 1; k < scan.ys.size(); ++k) {
    double a = g(scan.states[k - 1]), b = g(scan.states[k]);
    if (a == 0.0) roots.push_back(scan.ys[k - 1]);
    if ((a < 0.0) == (b < 0.0) || a == 0.0) continue;
    double root = bisect_root(
        [&](double y) { return g(scan.at(y)); }, scan.ys[k - 1], scan.ys[k],
        1e-13);
    roots.push_back(root);
  }
  return roots;
}

}  // namespace ptwell
