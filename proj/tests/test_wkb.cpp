#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ptwell/quad.hpp"
#include "ptwell/wkb.hpp"

using namespace ptwell;
using Catch::Approx;

TEST_CASE("carlini coefficients solve the momentum recursion", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(1.0);
  CarliniStack st = CarliniStack::for_spec(spec, cplx(0.36), 6);
  cplx z{0.9, -0.4};

  auto sum_at = [&](cplx zz, double h) {
    auto p = st.coefficients(zz, 6);
    cplx s = 0.0, pw = 1.0;
    for (int n = 0; n <= 6; ++n) {
      s += pw * p[n];
      pw *= h;
    }
    return s;
  };
  // Residual of p^2 + h p' - p0^2 must drop by ~2^7 per halving of h.
  double prev = 0.0;
  for (double h : {0.1, 0.05, 0.025}) {
    double d = 1e-6;
    cplx s = sum_at(z, h);
    cplx sp = (sum_at(z + d, h) - sum_at(z - d, h)) / (2.0 * d);
    cplx resid = s * s + h * sp - (spec.potential(z) - cplx(0.36));
    if (prev > 0.0) {
      double ratio = prev / std::abs(resid);
      REQUIRE(ratio > 60.0);
      REQUIRE(ratio < 260.0);
    }
    prev = std::abs(resid);
  }
}

TEST_CASE("low order coefficients at the harmonic point", "[wkb]") {
  CarliniStack st =
      CarliniStack::for_spec(PotentialSpec::harmonic(), cplx(1.0), 6);
  auto p = st.coefficients(cplx(2.0), 2);
  REQUIRE(std::abs(p[0] - cplx(std::sqrt(3.0))) < 1e-12);
  // p1 = -p0'/(2 p0) = -(z/p0)/(2 p0) = -1/3 at z = 2, E = 1.
  REQUIRE(std::abs(p[1] - cplx(-1.0 / 3.0)) < 1e-12);
}

TEST_CASE("odd coefficient identity -p1 = V'/(4 p0^2)", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(1.0);
  CarliniStack st = CarliniStack::for_spec(spec, cplx(0.4), 4);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> re(-2.0, 2.0), im(-2.0, -0.2);
  int checked = 0;
  while (checked < 20) {
    cplx z{re(rng), im(rng)};
    if (st.distance_to_turning(z) < 2.0 * st.exclusion_radius) continue;
    auto p = st.coefficients(z, 1);
    cplx q0 = spec.potential_derivative(z) / (4.0 * (p[0] * p[0]));
    REQUIRE(std::abs(-p[1] - q0) < 1e-10 * std::max(1.0, std::abs(q0)));
    ++checked;
  }
}

TEST_CASE("resummations reduce to p0 at chi = 0", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(0.2);
  CarliniStack st = CarliniStack::for_spec(spec, cplx(0.36), 6);
  cplx z{1.2, -0.7};
  cplx p0 = std::sqrt(spec.potential(z) - cplx(0.36));
  for (auto mode : {ResumMode::Classical, ResumMode::Truncation,
                    ResumMode::Pade11, ResumMode::ContinuedFraction}) {
    ResummedMomentum mom{st, mode, cplx(0.0)};
    REQUIRE(std::abs(mom.evaluate(z) - p0) < 1e-13);
  }
}

TEST_CASE("even part satisfies its defining relation", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(0.01);
  CarliniStack st = CarliniStack::for_spec(spec, cplx(0.36), 6);
  ResummedMomentum mom{st, ResumMode::Truncation, cplx(1e-4)};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> re(-1.5, 1.5), im(-1.8, -0.5);
  int checked = 0;
  while (checked < 8) {
    cplx z{re(rng), im(rng)};
    if (st.distance_to_turning(z) < 3.0 * st.exclusion_radius) continue;
    double d = 1e-6;
    cplx p = mom.evaluate(z);
    cplx dp = (mom.evaluate(z + d) - mom.evaluate(z - d)) / (2.0 * d);
    cplx ddp =
        (mom.evaluate(z + d) - 2.0 * p + mom.evaluate(z - d)) / (d * d);
    cplx q = -dp / (2.0 * p);
    cplx qp = -(ddp * 2.0 * p - 2.0 * dp * dp) / (4.0 * p * p);
    cplx resid = p * p - (spec.potential(z) - cplx(0.36)) +
                 cplx(1e-4) * (q * q + qp);
    REQUIRE(std::abs(resid) < 1e-7);
    ++checked;
  }
}

TEST_CASE("pade stays finite close to a turning point", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(0.05);
  CarliniStack st = CarliniStack::for_spec(spec, cplx(0.36), 6);
  auto tp = turning_points(spec, cplx(0.36));
  cplx z = tp.i_plus + cplx(1e-3, 0.0);
  ResummedMomentum pad{st, ResumMode::Pade11, cplx(0.05 * 0.05)};
  cplx v = pad.evaluate(z);
  REQUIRE(std::isfinite(std::abs(v)));
  ResummedMomentum trunc{st, ResumMode::Truncation, cplx(0.05 * 0.05)};
  REQUIRE_THROWS_AS(trunc.evaluate(z), NearTurningPoint);
}

TEST_CASE("harmonic stokes complex: real string, no board, four bundles",
          "[wkb]") {
  auto data = trace_stokes(PotentialSpec::harmonic(), cplx(1.0), cplx(0.0),
                           ResumMode::Classical);
  REQUIRE(data.topology == MonochordTopology::Detached);
  REQUIRE(data.string_line.has_value());
  REQUIRE_FALSE(data.board_line.has_value());
  for (cplx z : *data.string_line) {
    REQUIRE(std::abs(z.imag()) < 1e-6);
    REQUIRE(std::abs(z.real()) < 1.0 + 1e-6);
  }
  REQUIRE(asymptotic_bundle_count(data) == 4);
}

TEST_CASE("cubic stokes complex has five asymptotic bundles", "[wkb]") {
  auto data = trace_stokes(PotentialSpec::semiclassical_h(1.0), cplx(0.36),
                           cplx(0.0), ResumMode::Classical);
  REQUIRE(asymptotic_bundle_count(data) == 5);
}

TEST_CASE("board lies on the imaginary axis for positive energy", "[wkb]") {
  auto data = trace_stokes(PotentialSpec::semiclassical_h(1.0), cplx(0.36),
                           cplx(0.0), ResumMode::Classical);
  REQUIRE(data.board_line.has_value());
  double ytilde = imag_turning_point(0.36);
  double worst = 0.0;
  for (cplx z : *data.board_line) worst = std::max(worst, std::abs(z.real()));
  REQUIRE(worst < 1e-6);
  REQUIRE(std::abs(data.board_line->front() - iu * ytilde) < 1e-6);
}

TEST_CASE("string endpoints coincide with the turning points", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(1.0);
  auto data =
      trace_stokes(spec, cplx(0.36), cplx(0.0), ResumMode::Classical);
  auto tp = turning_points(spec, cplx(0.36));
  REQUIRE(data.string_line.has_value());
  cplx a = data.string_line->front(), b = data.string_line->back();
  double d1 = std::min(std::abs(a - tp.i_minus), std::abs(a - tp.i_plus));
  double d2 = std::min(std::abs(b - tp.i_minus), std::abs(b - tp.i_plus));
  REQUIRE(d1 < 1e-6);
  REQUIRE(d2 < 1e-6);
}

TEST_CASE("phase stays constant along traced stokes lines", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(1.0);
  auto data =
      trace_stokes(spec, cplx(0.37), cplx(0.0), ResumMode::Classical);
  int checked = 0;
  for (const auto& ln : data.lines) {
    if (ln.anti || ln.points.size() < 30) continue;
    // Independent quadrature of Re int p0 dz along the polyline, skipping
    // the singular launch point.
    cplx w = 0.0;
    cplx pprev = std::sqrt(spec.potential(ln.points[1]) - cplx(0.37));
    double arclen = 0.0;
    for (std::size_t i = 2; i < ln.points.size(); ++i) {
      cplx p = std::sqrt(spec.potential(ln.points[i]) - cplx(0.37));
      if (std::abs(p - pprev) > std::abs(p + pprev)) p = -p;
      w += 0.5 * (p + pprev) * (ln.points[i] - ln.points[i - 1]);
      arclen += std::abs(ln.points[i] - ln.points[i - 1]);
      pprev = p;
    }
    if (arclen < 0.5) continue;
    REQUIRE(std::abs(w.real()) < 1e-6 * arclen + 1e-8);
    ++checked;
  }
  REQUIRE(checked >= 5);
}

TEST_CASE("monochord contact topology around the critical energy", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(1.0);
  auto above = trace_stokes(spec, cplx(0.3533), cplx(0.0),
                            ResumMode::Classical);
  REQUIRE(above.topology == MonochordTopology::Detached);
  REQUIRE(above.contact_distance > 1e-3);

  auto below = trace_stokes(spec, cplx(0.3512), cplx(0.0),
                            ResumMode::Classical);
  REQUIRE(below.topology == MonochordTopology::Broken);
  REQUIRE(below.half_escapes_up[0]);
  REQUIRE(below.half_escapes_up[1]);
}

TEST_CASE("critical energy from the topology transition", "[wkb]") {
  double ec = critical_energy(0.3, 0.4, 1e-6);
  REQUIRE(ec == Approx(0.352268).margin(1e-4));
}

TEST_CASE("critical energy agrees with the action-reality root", "[wkb]") {
  // Independent locator: the one-well action integral int_{I0}^{I+} p0 dz is
  // purely imaginary exactly at the critical energy (the dog-bone action is
  // real there). Root of the real part by bisection.
  auto spec = PotentialSpec::semiclassical_h(1.0);
  auto a_of_e = [&](double e) {
    auto tp = turning_points(spec, cplx(e));
    // Straight-segment quadrature I0 -> I+, branch-continuous p0.
    GaussLegendre gl(80);
    cplx d = tp.i_plus - tp.i_zero;
    cplx acc = 0.0;
    cplx pprev{0.0};
    for (int k = 0; k < 80; ++k) {
      cplx z = tp.i_zero + (0.5 + 0.5 * gl.nodes[k]) * d;
      cplx p = std::sqrt(spec.potential(z) - cplx(e));
      if (pprev != cplx(0.0) && std::abs(p - pprev) > std::abs(p + pprev))
        p = -p;
      pprev = p;
      acc += gl.weights[k] * 0.5 * p * d;
    }
    return acc.real();
  };
  double ec_action = bisect_root(a_of_e, 0.34, 0.36, 1e-10);
  REQUIRE(ec_action == Approx(0.352268).margin(2e-5));
  double ec_trace = critical_energy(0.34, 0.36, 1e-6);
  REQUIRE(std::abs(ec_trace - ec_action) < 5e-5);
}

TEST_CASE("monochord instability under perturbations of the energy",
          "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(1.0);
  double ec = critical_energy(0.34, 0.36, 1e-6);

  auto at_ec = trace_stokes(spec, cplx(ec), cplx(0.0), ResumMode::Classical);
  if (at_ec.topology == MonochordTopology::Detached)
    REQUIRE(at_ec.contact_distance < 1e-3);

  auto shifted =
      trace_stokes(spec, cplx(ec + 1e-3), cplx(0.0), ResumMode::Classical);
  REQUIRE(shifted.topology == MonochordTopology::Detached);
  REQUIRE(shifted.contact_distance > 1e-4);

  auto complex_shift = trace_stokes(spec, cplx(ec, 1e-3), cplx(0.0),
                                    ResumMode::Classical);
  REQUIRE(complex_shift.half_escapes_up[0] !=
          complex_shift.half_escapes_up[1]);
}

TEST_CASE("string degenerates toward the bottom energy", "[wkb]") {
  WellData wells;
  auto spec = PotentialSpec::semiclassical_h(1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double f : {0.5, 0.25, 0.1}) {
    cplx e = wells.bottom_energy * (1.0 - f);  // along the imaginary axis
    auto tp = turning_points(spec, e);
    double span = std::abs(tp.i_minus - tp.i_zero);
    double well_dist = std::min(std::abs(tp.i_minus - cplx(wells.x_minus)),
                                std::abs(tp.i_zero - cplx(wells.x_minus)));
    REQUIRE(span < prev);
    REQUIRE(well_dist < 2.0 * std::sqrt(f));
    prev = span;
  }
}

TEST_CASE("exact and classical strings coincide at hbar = 0", "[wkb]") {
  auto spec = PotentialSpec::semiclassical_h(1.0);
  auto classical =
      trace_stokes(spec, cplx(0.36), cplx(0.0), ResumMode::Classical);
  auto exact = trace_stokes(spec, cplx(0.36), cplx(0.0), ResumMode::Pade11);
  REQUIRE(classical.string_line.has_value());
  REQUIRE(exact.string_line.has_value());
  double d = detail::polyline_min_distance(*classical.string_line,
                                           *exact.string_line);
  REQUIRE(d < 1e-8);
  REQUIRE(classical.string_line->size() == exact.string_line->size());
  double worst = 0.0;
  for (std::size_t i = 0; i < classical.string_line->size(); ++i)
    worst = std::max(worst, std::abs((*classical.string_line)[i] -
                                     (*exact.string_line)[i]));
  REQUIRE(worst < 1e-8);
}

TEST_CASE("board reality check", "[wkb]") {
  auto rep = board_on_axis_check(0.36, 0.05, 4);
  REQUIRE(rep.max_imag_p < 1e-10);
  REQUIRE(rep.max_imag_p0 < 1e-10);
  REQUIRE(rep.samples > 50);
  REQUIRE_THROWS_AS(board_on_axis_check(-1.0, 0.05), std::domain_error);

  // Positive control: a complex energy breaks the reality.
  auto spec = PotentialSpec::semiclassical_h(0.05);
  CarliniStack st(PolynomialPotential::from_spec(spec), cplx(0.36, 0.01), 4);
  ResummedMomentum mom{st, ResumMode::Truncation, cplx(0.05 * 0.05)};
  double worst = 0.0;
  for (int k = 0; k <= 40; ++k) {
    double y = imag_turning_point(0.36) + 0.1 + 0.05 * k;
    cplx ref = std::sqrt(spec.potential(iu * y) - cplx(0.36, 0.01));
    worst = std::max(worst, std::abs(mom.evaluate(iu * y, ref).imag()));
  }
  REQUIRE(worst > 1e-3);
}

TEST_CASE("classical mode reduces to the real momentum beyond the turning "
          "point", "[wkb]") {
  double e = 0.36;
  double ytilde = imag_turning_point(e);
  auto spec = PotentialSpec::semiclassical_h(1.0);
  CarliniStack st = CarliniStack::for_spec(spec, cplx(e), 2);
  ResummedMomentum mom{st, ResumMode::Classical, cplx(0.0)};
  for (double y = ytilde + 0.1; y < ytilde + 2.0; y += 0.2) {
    cplx p = mom.evaluate(iu * y, cplx(1.0));
    double expected = std::sqrt(y * y * y + y - e);
    REQUIRE(p.real() == Approx(expected).margin(1e-12));
    REQUIRE(std::abs(p.imag()) < 1e-12);
  }
}
