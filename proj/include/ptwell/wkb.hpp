#pragma once

#include <optional>
#include <vector>

#include "ptwell/common.hpp"
#include "ptwell/jet.hpp"
#include "ptwell/model.hpp"

namespace ptwell {

// --------------------------------------------------------------------------
// Polynomial potentials for the semiclassical machinery. The tracer accepts
// degree 2 (harmonic test family) and degree 3 (the cubic family).

struct PolynomialPotential {
  std::vector<cplx> coeffs;  // ascending powers

  static PolynomialPotential from_spec(const PotentialSpec& spec) {
    auto c = spec.v_coefficients();
    PolynomialPotential p;
    p.coeffs.assign(c.begin(), c.end());
    while (p.coeffs.size() > 1 && std::abs(p.coeffs.back()) == 0.0)
      p.coeffs.pop_back();
    return p;
  }

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  cplx eval(cplx z) const {
    cplx r = 0.0;
    for (int k = degree(); k >= 0; --k) r = r * z + coeffs[k];
    return r;
  }
  cplx deriv(cplx z) const {
    cplx r = 0.0;
    for (int k = degree(); k >= 1; --k) r = r * z + double(k) * coeffs[k];
    return r;
  }
  Jet jet_at(cplx z, int order) const {
    Jet x = Jet::variable(z, order);
    Jet r = Jet::constant(coeffs[degree()], order);
    for (int k = degree() - 1; k >= 0; --k)
      r = r * x + Jet::constant(coeffs[k], order);
    return r;
  }

  // Roots of V(z) - E.
  std::vector<cplx> turning(cplx energy) const {
    if (degree() == 2) {
      cplx a = coeffs[2], b = coeffs[1], c = coeffs[0] - energy;
      cplx disc = std::sqrt(b * b - 4.0 * a * c);
      std::vector<cplx> r{(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)};
      if (r[0].real() > r[1].real()) std::swap(r[0], r[1]);
      return r;
    }
    if (degree() == 3) {
      auto r3 = cubic_roots(coeffs[3], coeffs[2], coeffs[1],
                            coeffs[0] - energy);
      return {r3.begin(), r3.end()};
    }
    throw std::domain_error("turning: polynomial degree must be 2 or 3");
  }
};

// --------------------------------------------------------------------------
// Carlini recursion for p_hbar = sum_n p_n hbar^n solving
//   p_hbar^2 + hbar p_hbar' = p_0^2,    p_0^2 = V - E,
// evaluated through nested forward-mode differentiation:
//   p_1 = -p_0'/(2 p_0),
//   p_n = -(sum_{j=1}^{n-1} p_{n-j} p_j + p_{n-1}') / (2 p_0).

struct CarliniStack {
  PolynomialPotential potential;
  cplx energy{0.0};
  int max_order = 6;
  std::vector<cplx> turning;
  double min_separation = std::numeric_limits<double>::infinity();
  double exclusion_radius = 0.0;

  CarliniStack() = default;
  CarliniStack(PolynomialPotential pot, cplx e, int order = 6)
      : potential(std::move(pot)), energy(e), max_order(order) {
    turning = potential.turning(energy);
    for (std::size_t a = 0; a < turning.size(); ++a)
      for (std::size_t b = a + 1; b < turning.size(); ++b)
        min_separation =
            std::min(min_separation, std::abs(turning[a] - turning[b]));
    if (!std::isfinite(min_separation)) min_separation = 1.0;
    exclusion_radius = 1e-2 * min_separation;
  }
  static CarliniStack for_spec(const PotentialSpec& spec, cplx e,
                               int order = 6) {
    return CarliniStack(PolynomialPotential::from_spec(spec), e, order);
  }

  double distance_to_turning(cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (auto t : turning) d = std::min(d, std::abs(z - t));
    return d;
  }

  // Values p_0(z) .. p_upTo(z); branch of p_0 fixed nearest to p0_ref.
  std::vector<cplx> coefficients(cplx z, int up_to,
                                 cplx p0_ref = cplx(0.0)) const {
    if (up_to > max_order)
      throw std::domain_error("coefficients: beyond the configured order");
    if (distance_to_turning(z) < exclusion_radius)
      throw NearTurningPoint(
          "coefficients: inside a turning-point exclusion disk");
    return coefficients_unguarded(z, up_to, p0_ref);
  }

  std::vector<cplx> coefficients_unguarded(cplx z, int up_to,
                                           cplx p0_ref) const {
    const int order = up_to + 2;
    Jet v = potential.jet_at(z, order) - Jet::constant(energy, order);
    std::vector<Jet> p;
    p.push_back(jet_sqrt(v, p0_ref));
    for (int n = 1; n <= up_to; ++n) {
      Jet acc = jet_derivative(p[n - 1]);
      for (int j = 1; j <= n - 1; ++j)
        acc = acc + truncate(p[j] * p[n - j], acc.order());
      p.push_back(cplx(-0.5) * (acc / truncate(p[0], acc.order())));
    }
    std::vector<cplx> values(up_to + 1);
    for (int n = 0; n <= up_to; ++n) values[n] = p[n].value();
    return values;
  }
};

// --------------------------------------------------------------------------
// Even-part resummations of the momentum.

enum class ResumMode { Classical, Truncation, Pade11, ContinuedFraction };

inline const char* resum_mode_name(ResumMode m) {
  switch (m) {
    case ResumMode::Classical: return "classical";
    case ResumMode::Truncation: return "truncation";
    case ResumMode::Pade11: return "pade11";
    case ResumMode::ContinuedFraction: return "cf";
  }
  return "?";
}

struct ResummedMomentum {
  CarliniStack stack;
  ResumMode mode = ResumMode::Classical;
  cplx chi{0.0};  // chi = hbar^2

  cplx evaluate(cplx z, cplx p0_ref = cplx(0.0)) const {
    const double dist = stack.distance_to_turning(z);
    if (mode == ResumMode::Classical || chi == cplx(0.0)) {
      if (dist < 1e-9)
        throw NearTurningPoint("evaluate: on a turning point");
      Jet v = stack.potential.jet_at(z, 0) -
              Jet::constant(stack.energy, 0);
      return jet_sqrt(v, p0_ref).value();
    }
    const bool pade_like =
        mode == ResumMode::Pade11 || mode == ResumMode::ContinuedFraction;
    double floor = pade_like ? stack.exclusion_radius / 100.0
                             : stack.exclusion_radius;
    if (dist < floor)
      throw NearTurningPoint("evaluate: inside the exclusion disk");

    if (mode == ResumMode::Truncation) {
      auto p = stack.coefficients_unguarded(z, stack.max_order, p0_ref);
      cplx sum = 0.0, pw = 1.0;
      for (int j = 0; 2 * j <= stack.max_order; ++j) {
        sum += pw * p[2 * j];
        pw *= chi;
      }
      return sum;
    }
    const int need = mode == ResumMode::Pade11 ? 4 : 6;
    auto p = stack.coefficients_unguarded(z, need, p0_ref);
    if (mode == ResumMode::Pade11) {
      if (std::abs(p[2]) == 0.0) return p[0];
      cplx den = 1.0 - chi * (p[4] / p[2]);
      if (std::abs(den) < 1e-10)
        throw PoleOnEvaluation("pade11 denominator vanished");
      return p[0] + chi * p[2] / den;
    }
    // Continued fraction through p6 (three levels).
    if (std::abs(p[2]) == 0.0) return p[0];
    cplx inner = 1.0;
    if (std::abs(p[4]) > 0.0) {
      cplx d2 = 1.0 - chi * (p[6] / p[4]);
      if (std::abs(d2) < 1e-10)
        throw PoleOnEvaluation("continued fraction inner pole");
      inner = 1.0 - chi * (p[4] / p[2]) / d2;
    }
    if (std::abs(inner) < 1e-10)
      throw PoleOnEvaluation("continued fraction outer pole");
    return p[0] + chi * p[2] / inner;
  }
};

// --------------------------------------------------------------------------
// Stokes complex tracing.

struct StokesLine {
  std::vector<cplx> points;
  bool anti = false;   // anti-Stokes line
  bool exact = false;  // traced with the resummed momentum
  int origin = -1;     // index into turning_points
  enum class End { Boundary, Connected, ArcCap, Stalled } end = End::Boundary;
  int connected_to = -1;
  cplx final_direction{0.0};

  double arclength() const {
    double s = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
      s += std::abs(points[i] - points[i - 1]);
    return s;
  }
};

enum class MonochordTopology { Detached, Attached, Broken, Degenerate };

inline const char* topology_name(MonochordTopology t) {
  switch (t) {
    case MonochordTopology::Detached: return "detached";
    case MonochordTopology::Attached: return "attached";
    case MonochordTopology::Broken: return "broken";
    case MonochordTopology::Degenerate: return "degenerate";
  }
  return "?";
}

struct StokesComplexData {
  cplx energy{0.0};
  cplx hbar{0.0};
  ResumMode mode = ResumMode::Classical;
  std::vector<cplx> turning_points;
  int idx_minus = -1, idx_zero = -1, idx_plus = -1;
  bool coalescent = false;
  std::vector<StokesLine> lines;
  std::optional<std::vector<cplx>> string_line;  // joins I- and I+
  std::optional<std::vector<cplx>> board_line;   // from I0 toward +i inf
  double contact_distance = std::numeric_limits<double>::infinity();
  MonochordTopology topology = MonochordTopology::Broken;
  // End classes of the two string halves launched from I- and I+.
  StokesLine::End half_end[2] = {StokesLine::End::Boundary,
                                 StokesLine::End::Boundary};
  int half_target[2] = {-1, -1};
  bool half_escapes_up[2] = {false, false};
};

struct TraceOptions {
  double z_max = 0.0;        // 0 = auto from the turning-point scale
  double arc_cap = 40.0;
  double h_max = 0.015;
  double connect_angle = 30.0 * pi / 180.0;
  bool trace_anti = true;
};

namespace detail {

inline double polyline_min_distance(const std::vector<cplx>& a,
                                    const std::vector<cplx>& b) {
  // Coarse pass on the stored points, then local refinement on the two
  // segments around the winner, resampled at 1e-3.
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      double d = std::abs(a[i] - b[j]);
      if (d < best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  auto refine = [&](const std::vector<cplx>& u, std::size_t k) {
    std::vector<cplx> seg;
    std::size_t lo = k > 0 ? k - 1 : 0;
    std::size_t hi = std::min(k + 1, u.size() - 1);
    for (std::size_t t = lo; t < hi; ++t) {
      double len = std::abs(u[t + 1] - u[t]);
      int m = std::max(1, static_cast<int>(len / 1e-3));
      m = std::min(m, 400);
      for (int q = 0; q <= m; ++q)
        seg.push_back(u[t] + (double(q) / m) * (u[t + 1] - u[t]));
    }
    if (seg.empty()) seg.push_back(u[k]);
    return seg;
  };
  auto sa = refine(a, bi), sb = refine(b, bj);
  for (auto za : sa)
    for (auto zb : sb) best = std::min(best, std::abs(za - zb));
  return best;
}

}  // namespace detail

// Traces every Stokes (and optionally anti-Stokes) line of the complex at
// energy E, assembles the string and the board when present, and records the
// contact diagnostics.
inline StokesComplexData trace_stokes(const PolynomialPotential& pot,
                                      cplx energy, cplx hbar, ResumMode mode,
                                      const TraceOptions& opts = {}) {
  StokesComplexData data;
  data.energy = energy;
  data.hbar = hbar;
  data.mode = mode;
  data.turning_points = pot.turning(energy);
  const auto& tps = data.turning_points;
  const int ntp = static_cast<int>(tps.size());

  double scale = 1.0;
  for (auto t : tps) scale = std::max(scale, std::abs(t));
  const double z_max = opts.z_max > 0.0 ? opts.z_max : 3.0 * (1.0 + scale);

  double minsep = std::numeric_limits<double>::infinity();
  for (int a = 0; a < ntp; ++a)
    for (int b = a + 1; b < ntp; ++b)
      minsep = std::min(minsep, std::abs(tps[a] - tps[b]));
  if (!std::isfinite(minsep)) minsep = 1.0;
  data.coalescent = minsep < 1e-9 * scale;

  // Labeling. Degree-2 members have no I0 (the board is absent).
  if (ntp == 2) {
    data.idx_minus = 0;
    data.idx_plus = 1;
  } else {
    auto key = [&](int k) {
      return std::make_pair(tps[k].imag(), -std::abs(tps[k].real()));
    };
    int zi = 0;
    for (int k = 1; k < ntp; ++k)
      if (key(k) > key(zi)) zi = k;
    data.idx_zero = zi;
    std::vector<int> rest;
    for (int k = 0; k < ntp; ++k)
      if (k != zi) rest.push_back(k);
    if (tps[rest[0]].real() > tps[rest[1]].real())
      std::swap(rest[0], rest[1]);
    data.idx_minus = rest[0];
    data.idx_plus = rest[1];
  }

  const double launch_r = 1e-2 * minsep;
  const double connect_r = std::max(1e-4 * minsep, 1e-7);

  CarliniStack stack(pot, energy, 6);
  ResummedMomentum momentum{stack, mode, hbar * hbar};
  const bool exact = mode != ResumMode::Classical && hbar != cplx(0.0);

  auto eval_p = [&](cplx z, cplx ref) { return momentum.evaluate(z, ref); };

  auto trace_one = [&](int origin, double phase, bool anti) -> StokesLine {
    StokesLine line;
    line.anti = anti;
    line.exact = exact;
    line.origin = origin;
    cplx z = tps[origin] + launch_r * std::polar(1.0, phase);
    line.points.push_back(tps[origin]);
    line.points.push_back(z);

    cplx p;
    try {
      p = eval_p(z, cplx(0.0));
    } catch (const NumericalError&) {
      line.end = StokesLine::End::Stalled;
      return line;
    }
    // Orient p so that the implied tangent matches the launch direction.
    cplx u = anti ? std::conj(p) / std::abs(p)
                  : iu * std::conj(p) / std::abs(p);
    cplx launch_dir = std::polar(1.0, phase);
    if ((u * std::conj(launch_dir)).real() < 0.0) {
      p = -p;
      u = -u;
    }
    cplx p_ref = p;
    cplx u_prev = u;
    double arc = std::abs(z - tps[origin]);
    cplx w_err = 0.0;  // accumulated phase drift along the line

    auto tangent = [&](cplx pt) {
      cplx t = anti ? std::conj(pt) / std::abs(pt)
                    : iu * std::conj(pt) / std::abs(pt);
      if ((t * std::conj(u_prev)).real() < 0.0) t = -t;
      return t;
    };

    for (int step = 0; step < 400000; ++step) {
      double dist_tp = std::numeric_limits<double>::infinity();
      for (auto t : tps) dist_tp = std::min(dist_tp, std::abs(z - t));
      // Curvature-limited step, slowing down near turning points.
      double h = std::min(opts.h_max, 0.25 * dist_tp + 0.5 * connect_r);
      double pa = std::abs(p);
      if (pa > 0.0) {
        double dp = std::abs(eval_p(z + 1e-5 * u, p) - p) / 1e-5;
        if (dp > 0.0) h = std::min(h, 0.1 * pa / dp);
      }
      h = std::max(h, 1e-9);

      // Midpoint step on the unit direction field.
      cplx u1 = tangent(p);
      cplx zm = z + 0.5 * h * u1;
      cplx pm;
      try {
        pm = eval_p(zm, p);
      } catch (const NumericalError&) {
        line.end = StokesLine::End::Stalled;
        return line;
      }
      cplx u2 = tangent(pm);
      cplx z_next = z + h * u2;
      cplx p_next;
      try {
        p_next = eval_p(z_next, pm);
      } catch (const NumericalError&) {
        line.end = StokesLine::End::Stalled;
        return line;
      }

      // Phase-drift correction keeps the line on its exact level set.
      w_err += 0.5 * h * (p * u2 + p_next * u2);
      double err = anti ? w_err.imag() : w_err.real();
      cplx grad = anti ? iu * std::conj(p_next) : std::conj(p_next);
      cplx corr = -err * grad / std::norm(p_next);
      if (std::abs(corr) < 0.5 * h) {
        z_next += corr;
        if (anti)
          w_err -= cplx(0.0, err);
        else
          w_err -= err;
        try {
          p_next = eval_p(z_next, p_next);
        } catch (const NumericalError&) {
          line.end = StokesLine::End::Stalled;
          return line;
        }
      }

      arc += std::abs(z_next - z);
      u_prev = tangent(p_next);
      z = z_next;
      p = p_next;
      p_ref = p;
      line.points.push_back(z);
      line.final_direction = u_prev;

      // Termination checks.
      if (std::abs(z) > z_max) {
        line.end = StokesLine::End::Boundary;
        return line;
      }
      if (arc > opts.arc_cap) {
        line.end = StokesLine::End::ArcCap;
        return line;
      }
      if (h <= 1e-9 + 1e-15) {
        line.end = StokesLine::End::Stalled;
        return line;
      }
      for (int k = 0; k < ntp; ++k) {
        if (k == origin && arc < 6.0 * launch_r) continue;
        double d = std::abs(z - tps[k]);
        if (d < connect_r) {
          line.end = StokesLine::End::Connected;
          line.connected_to = k;
          line.points.push_back(tps[k]);
          return line;
        }
        if (d < 40.0 * connect_r) {
          cplx to_tp = (tps[k] - z) / d;
          double ang = std::abs(std::arg(to_tp * std::conj(u_prev)));
          if (d < 10.0 * connect_r && ang < opts.connect_angle) {
            line.end = StokesLine::End::Connected;
            line.connected_to = k;
            line.points.push_back(tps[k]);
            return line;
          }
        }
      }
    }
    line.end = StokesLine::End::ArcCap;
    return line;
  };

  // Launch the three local Stokes directions (and anti-Stokes on request)
  // from every simple turning point: p0^2 ~ c (z - t) with c = V'(t).
  for (int k = 0; k < ntp; ++k) {
    cplx c = pot.deriv(tps[k]);
    if (std::abs(c) == 0.0) continue;  // coalescent; handled by the flag
    double base = std::arg(c);
    for (int j = 0; j < 3; ++j) {
      double phase = (pi - base + 2.0 * pi * j) / 3.0;
      data.lines.push_back(trace_one(k, phase, false));
      if (opts.trace_anti) {
        double aphase = (-base + 2.0 * pi * j) / 3.0;
        data.lines.push_back(trace_one(k, aphase, true));
      }
    }
  }

  // --- assembly -----------------------------------------------------------
  auto best_candidate = [&](int from, int toward) -> const StokesLine* {
    const StokesLine* best = nullptr;
    double best_score = -2.0;
    cplx dir = (tps[toward] - tps[from]) /
               std::abs(tps[toward] - tps[from]);
    for (const auto& ln : data.lines) {
      if (ln.anti || ln.origin != from || ln.points.size() < 2) continue;
      cplx d0 = ln.points[1] - ln.points[0];
      double score = (d0 * std::conj(dir)).real() / std::abs(d0);
      if (score > best_score) {
        best_score = score;
        best = &ln;
      }
    }
    return best;
  };

  if (data.idx_minus >= 0 && data.idx_plus >= 0 && !data.coalescent) {
    const StokesLine* lm = best_candidate(data.idx_minus, data.idx_plus);
    const StokesLine* lp = best_candidate(data.idx_plus, data.idx_minus);
    for (int side = 0; side < 2; ++side) {
      const StokesLine* ln = side == 0 ? lm : lp;
      if (!ln) continue;
      data.half_end[side] = ln->end;
      data.half_target[side] = ln->connected_to;
      if (ln->end == StokesLine::End::Boundary ||
          ln->end == StokesLine::End::ArcCap) {
        double a = std::arg(ln->final_direction);
        data.half_escapes_up[side] = std::abs(a - pi / 2.0) < pi / 5.0;
      }
    }
    if (lm && lm->end == StokesLine::End::Connected &&
        lm->connected_to == data.idx_plus) {
      data.string_line = lm->points;
      data.topology = MonochordTopology::Detached;
    } else if (data.idx_zero >= 0) {
      // Chain through I0?
      bool m_to_zero = lm && lm->end == StokesLine::End::Connected &&
                       lm->connected_to == data.idx_zero;
      bool p_to_zero = lp && lp->end == StokesLine::End::Connected &&
                       lp->connected_to == data.idx_zero;
      if (m_to_zero && p_to_zero) {
        std::vector<cplx> chain = lm->points;
        chain.insert(chain.end(), lp->points.rbegin(), lp->points.rend());
        data.string_line = chain;
        data.topology = MonochordTopology::Attached;
      } else {
        data.topology = MonochordTopology::Broken;
      }
    }
  }
  if (data.coalescent) data.topology = MonochordTopology::Degenerate;

  if (data.idx_zero >= 0) {
    // The board is the I0 line that leaves toward (and ends nearest to) the
    // positive imaginary direction.
    const StokesLine* best = nullptr;
    double best_score = -2.0;
    for (const auto& ln : data.lines) {
      if (ln.anti || ln.origin != data.idx_zero || ln.points.size() < 2)
        continue;
      if (ln.end == StokesLine::End::Connected) continue;
      cplx zb = ln.points.back();
      double score = zb.imag() / (std::abs(zb) + 1e-12);
      if (score > best_score) {
        best_score = score;
        best = &ln;
      }
    }
    if (best && best_score > 0.5) data.board_line = best->points;
  }

  if (data.string_line && data.board_line) {
    data.contact_distance =
        detail::polyline_min_distance(*data.string_line, *data.board_line);
  } else if (data.topology == MonochordTopology::Attached && data.board_line) {
    data.contact_distance = 0.0;
  }
  return data;
}

inline StokesComplexData trace_stokes(const PotentialSpec& spec, cplx energy,
                                      cplx hbar, ResumMode mode,
                                      const TraceOptions& opts = {}) {
  return trace_stokes(PolynomialPotential::from_spec(spec), energy, hbar, mode,
                      opts);
}

// --------------------------------------------------------------------------
// Critical energy of the monochord at hbar = 0: the topology transition
// where the string stops joining I- to I+ directly. Bisection on the traced
// topology over the given bracket.

inline double critical_energy(double lo = 0.3, double hi = 0.4,
                              double tol = 1e-6) {
  auto pot =
      PolynomialPotential::from_spec(PotentialSpec::semiclassical_h(1.0));
  auto connected = [&](double e) {
    auto data = trace_stokes(pot, cplx(e), cplx(0.0), ResumMode::Classical);
    return data.topology == MonochordTopology::Detached;
  };
  bool at_lo = connected(lo), at_hi = connected(hi);
  if (at_lo == at_hi)
    throw NoTransition("critical_energy: no topology change in the bracket");
  // The detached side is the predicate-true side.
  if (at_hi)
    return bisect_predicate([&](double e) { return !connected(e); }, lo, hi,
                            tol);
  return bisect_predicate([&](double e) { return connected(e); }, lo, hi, tol);
}

// --------------------------------------------------------------------------
// Reality of the resummed momentum along the board (the imaginary axis seen
// as the real axis of the rotated representation).

struct BoardRealityReport {
  double max_imag_p = 0.0;
  double max_imag_p0 = 0.0;
  int samples = 0;
};

inline BoardRealityReport board_on_axis_check(double energy, double hbar,
                                              int order = 4) {
  if (!(energy > 0.0) || !(hbar > 0.0))
    throw std::domain_error("board_on_axis_check: requires E > 0, hbar > 0");
  return [&] {
    auto spec = PotentialSpec::semiclassical_h(hbar);
    CarliniStack stack(PolynomialPotential::from_spec(spec), cplx(energy),
                       order);
    ResummedMomentum mom{stack, ResumMode::Truncation, cplx(hbar * hbar)};
    double ytilde = imag_turning_point(energy);
    BoardRealityReport rep;
    double y0 = ytilde + std::max(0.05, 2.0 * stack.exclusion_radius);
    for (int k = 0; k <= 60; ++k) {
      double y = y0 + k * 0.05;
      cplx z = iu * y;
      cplx p0 = std::sqrt(spec.potential(z) - energy);
      cplx p = mom.evaluate(z, p0);
      rep.max_imag_p = std::max(rep.max_imag_p, std::abs(p.imag()));
      rep.max_imag_p0 = std::max(rep.max_imag_p0, std::abs(p0.imag()));
      ++rep.samples;
    }
    return rep;
  }();
}

// Count of distinct asymptotic direction bundles among boundary-terminated
// Stokes lines (5 for the cubic family, 4 for the harmonic member).
inline int asymptotic_bundle_count(const StokesComplexData& data,
                                   double cluster_tol = 0.3) {
  std::vector<double> dirs;
  for (const auto& ln : data.lines) {
    if (ln.anti || ln.end != StokesLine::End::Boundary) continue;
    double a = std::arg(ln.points.back());
    bool found = false;
    for (double d : dirs) {
      double diff = std::abs(
          std::remainder(a - d, 2.0 * pi));
      if (diff < cluster_tol) found = true;
    }
    if (!found) dirs.push_back(a);
  }
  return static_cast<int>(dirs.size());
}

}  // namespace ptwell
