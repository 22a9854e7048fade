#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ptwell/model.hpp"
#include "oracles.hpp"

using namespace ptwell;
using Catch::Approx;

TEST_CASE("beta map evaluates the scaling formula", "[model]") {
  HbarParam one{cplx(1.0)};
  cplx plus = to_beta(one, +1);
  cplx expected = std::exp(-iu * (5.0 * pi / 4.0)) * std::pow(3.0, -1.25);
  REQUIRE(std::abs(plus - expected) < 1e-15);
  REQUIRE(plus.real() == Approx(-0.17909499).margin(1e-6));
  REQUIRE(plus.imag() == Approx(0.17909499).margin(1e-6));

  cplx minus = to_beta(one, -1);
  REQUIRE(std::abs(minus - std::conj(plus)) < 1e-15);

  HbarParam small{cplx(0.0558)};
  REQUIRE(std::abs(to_beta(small, +1) - oracles::beta_map(cplx(0.0558), +1)) <
          1e-15);
}

TEST_CASE("beta map rejects parameters outside the sector", "[model]") {
  REQUIRE_THROWS_AS(HbarParam{cplx(0.0, 1.0)}, std::domain_error);
  REQUIRE_THROWS_AS(HbarParam{cplx(0.0)}, std::domain_error);
  REQUIRE_THROWS_AS(HbarParam{cplx(0.03, 0.3)}, std::domain_error);
  REQUIRE_NOTHROW(HbarParam{cplx(1.0, 0.5)});
}

TEST_CASE("beta branches pair up under conjugation", "[model]") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> mag(0.05, 5.0), ang(-0.7, 0.7);
  for (int i = 0; i < 50; ++i) {
    cplx h = std::polar(mag(rng), ang(rng) * pi / 4.0);
    cplx lhs = to_beta(HbarParam{h}, +1);
    cplx rhs = std::conj(to_beta(HbarParam{std::conj(h)}, -1));
    REQUIRE(std::abs(lhs - rhs) < 1e-14 * std::abs(lhs));
  }
}

TEST_CASE("alpha map", "[model]") {
  REQUIRE(std::abs(to_alpha(cplx(1.0)) - cplx(-1.0)) < 1e-15);
  REQUIRE(std::abs(to_alpha(cplx(0.0558)) -
                   cplx(oracles::alpha_map_real(0.0558))) < 1e-12);
  // Monotone approach to zero from below along hbar = 10^k.
  double prev = -2.0;
  for (int k = 0; k <= 6; ++k) {
    double a = to_alpha(cplx(std::pow(10.0, k))).real();
    REQUIRE(a < 0.0);
    REQUIRE(a > prev);
    prev = a;
  }
  REQUIRE(std::abs(prev) < 2e-5);
  REQUIRE_THROWS_AS(to_alpha(cplx(0.0)), std::domain_error);
}

TEST_CASE("energy scaling is the identity at hbar = 1 and inverts cleanly",
          "[model]") {
  cplx z{1.37, -0.22};
  REQUIRE(std::abs(scale_energy_k_to_h(cplx(1.0), z) - z) < 1e-15);

  cplx e{1.2, 0.1};
  cplx rt = scale_energy_h_to_k(cplx(0.3), scale_energy_k_to_h(cplx(0.3), e));
  REQUIRE(std::abs(rt - e) < 1e-14 * std::abs(e));

  std::mt19937 rng(777);
  std::uniform_real_distribution<double> mag(0.05, 5.0), ang(-0.9, 0.9),
      re(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    cplx h = std::polar(mag(rng), ang(rng) * pi / 4.0);
    cplx ek{re(rng), re(rng)};
    cplx round = scale_energy_h_to_k(h, scale_energy_k_to_h(h, ek));
    REQUIRE(std::abs(round - ek) <= 1e-14 * std::max(1.0, std::abs(ek)));
  }
}

TEST_CASE("turning points of the cubic at E = 0", "[model]") {
  auto tp = turning_points(PotentialSpec::semiclassical_h(1.0), cplx(0.0));
  REQUIRE(std::abs(tp.i_minus - cplx(-1.0)) < 1e-12);
  REQUIRE(std::abs(tp.i_zero) < 1e-12);
  REQUIRE(std::abs(tp.i_plus - cplx(1.0)) < 1e-12);
  REQUIRE_FALSE(tp.coalescent);
}

TEST_CASE("turning points coalesce at the bottom energy", "[model]") {
  WellData wells;
  auto tp = turning_points(PotentialSpec::semiclassical_h(1.0),
                           wells.bottom_energy);
  REQUIRE(tp.coalescent);
  // Two of the three roots collapse onto the well x_-.
  int near_well = 0;
  for (auto z : tp.all())
    if (std::abs(z - cplx(wells.x_minus)) < 1e-4) ++near_well;
  REQUIRE(near_well >= 2);
  // The remaining simple root sits at 2/sqrt(3).
  bool has_far = false;
  for (auto z : tp.all())
    if (std::abs(z - cplx(2.0 / std::sqrt(3.0))) < 1e-9) has_far = true;
  REQUIRE(has_far);
}

TEST_CASE("turning points at the critical energy", "[model]") {
  const double ec = 0.352268;
  auto spec = PotentialSpec::semiclassical_h(1.0);
  auto tp = turning_points(spec, cplx(ec));
  REQUIRE_FALSE(tp.coalescent);
  for (auto z : tp.all()) {
    REQUIRE(std::abs(spec.potential(z) - cplx(ec)) < 1e-12);
  }
  double ytilde = oracles::bisect_imag_turning_point(ec);
  REQUIRE(std::abs(tp.i_zero - iu * ytilde) < 1e-10);
  REQUIRE(tp.i_plus.real() > 0.0);
  REQUIRE(tp.i_minus.real() < 0.0);
}

TEST_CASE("turning point set is Px symmetric for real positive energies",
          "[model]") {
  auto spec = PotentialSpec::semiclassical_h(1.0);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> en(1e-3, 1.0);
  for (int i = 0; i < 50; ++i) {
    double e = en(rng);
    auto tp = turning_points(spec, cplx(e));
    REQUIRE(std::abs(tp.i_minus + std::conj(tp.i_plus)) < 1e-10);
    REQUIRE(std::abs(tp.i_zero.real()) < 1e-10);
    REQUIRE(tp.i_zero.imag() > 0.0);
    for (auto z : tp.all())
      REQUIRE(std::abs(spec.potential(z) - cplx(e)) <
              1e-12 * std::max(1.0, e));
  }
}

TEST_CASE("imaginary turning point height", "[model]") {
  REQUIRE(imag_turning_point(2.0) == Approx(1.0).margin(1e-12));
  double e1 = 0.352268;
  REQUIRE(imag_turning_point(e1) ==
          Approx(oracles::bisect_imag_turning_point(e1)).margin(1e-12));
  double e2 = 2.0 / (3.0 * std::sqrt(3.0));
  REQUIRE(imag_turning_point(e2) ==
          Approx(oracles::bisect_imag_turning_point(e2)).margin(1e-12));
  REQUIRE_THROWS_AS(imag_turning_point(0.0), std::domain_error);
  REQUIRE_THROWS_AS(imag_turning_point(-1.0), std::domain_error);
}

TEST_CASE("well data", "[model]") {
  WellData wells;
  auto spec = PotentialSpec::semiclassical_h(1.0);
  REQUIRE(wells.x_plus == Approx(1.0 / std::sqrt(3.0)));
  REQUIRE(std::abs(spec.potential(cplx(wells.x_minus)) - wells.bottom_energy) <
          1e-15);
  REQUIRE(std::abs(spec.potential_derivative(cplx(wells.x_plus))) < 1e-15);
}
