#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ptwell/spectral.hpp"
#include "oracles.hpp"

using namespace ptwell;
using Catch::Approx;

TEST_CASE("harmonic operator assembles diagonally", "[spectral]") {
  GalerkinConfig cfg{16, 1.0, PotentialSpec::harmonic()};
  auto m = assemble(cfg);
  for (int j = 0; j < 16; ++j)
    for (int k = 0; k < 16; ++k) {
      cplx expected = j == k ? cplx(2.0 * j + 1.0) : cplx(0.0);
      REQUIRE(std::abs(m(j, k) - expected) < 1e-14);
    }
}

TEST_CASE("cubic block matches the ladder algebra", "[spectral]") {
  GalerkinConfig cfg{8, 1.0, PotentialSpec::scaled_k(0.0)};
  auto m = assemble(cfg);
  REQUIRE(std::abs(m(0, 3) - iu * oracles::x3_entry_far(0)) < 1e-15);
  REQUIRE(std::abs(m(0, 1) - iu * oracles::x3_entry_near(0)) < 1e-15);
  REQUIRE(std::abs(m(2, 5) - iu * oracles::x3_entry_far(2)) < 1e-14);
  REQUIRE(std::abs(m(3, 4) - iu * oracles::x3_entry_near(3)) < 1e-14);
}

TEST_CASE("assembled matrices are complex symmetric", "[spectral]") {
  for (auto spec : {PotentialSpec::semiclassical_h(cplx(0.7, 0.1)),
                    PotentialSpec::scaled_k(cplx(-2.0, 0.0)),
                    PotentialSpec::scaled_k(cplx(1.5, 0.4)),
                    PotentialSpec::perturbative_b(cplx(0.3, 0.0))}) {
    GalerkinConfig cfg{24, 1.3, spec};
    auto m = assemble(cfg);
    double worst = 0.0;
    for (int j = 0; j < 24; ++j)
      for (int k = 0; k < 24; ++k)
        worst = std::max(worst, std::abs(m(j, k) - m(k, j)));
    REQUIRE(worst < 1e-15);
  }
}

TEST_CASE("eigen decomposition basics", "[spectral]") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  d(2, 2) = 5.0;
  auto pairs = eigen_decompose(d);
  REQUIRE(std::abs(pairs[0].first - cplx(1.0)) < 1e-14);
  REQUIRE(std::abs(pairs[1].first - cplx(3.0)) < 1e-14);
  REQUIRE(std::abs(pairs[2].first - cplx(5.0)) < 1e-14);
  REQUIRE(std::abs(pairs[1].second(1)) == Approx(1.0).margin(1e-12));

  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2, 2);
  t(0, 1) = 1.0;
  t(1, 0) = 1e-8;
  auto tp = eigen_decompose(t);
  REQUIRE(std::abs(tp[0].first + 1e-4) < 1e-10);
  REQUIRE(std::abs(tp[1].first - 1e-4) < 1e-10);
}

TEST_CASE("eigen residuals on a random dense matrix", "[spectral]") {
  std::mt19937 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd a(50, 50);
  for (int j = 0; j < 50; ++j)
    for (int k = 0; k < 50; ++k) a(j, k) = cplx(g(rng), g(rng));
  double anorm = a.norm();
  for (const auto& [lam, v] : eigen_decompose(a)) {
    double resid = (a * v - lam * v).norm();
    REQUIRE(resid < 1e-10 * anorm);
  }
}

TEST_CASE("harmonic spectrum is exact", "[spectral]") {
  auto slice = stabilized_spectrum(PotentialSpec::harmonic(), 5);
  REQUIRE(slice.levels.size() == 5);
  for (int k = 0; k < 5; ++k) {
    REQUIRE(std::abs(slice.levels[k].energy - cplx(2.0 * k + 1.0)) < 1e-10);
    REQUIRE(slice.levels[k].accuracy < 1e-8);
  }
}

TEST_CASE("ground state of the pure cubic member", "[spectral]") {
  auto slice = stabilized_spectrum(PotentialSpec::scaled_k(0.0), 1);
  // Cross-checked against the shooting oracle; see below.
  REQUIRE(slice.levels[0].energy.real() == Approx(1.1562670720).margin(2e-7));
  REQUIRE(std::abs(slice.levels[0].energy.imag()) < 1e-8);
}

TEST_CASE("levels are real at large hbar", "[spectral]") {
  auto slice = stabilized_spectrum(PotentialSpec::semiclassical_h(5.0), 8);
  REQUIRE(slice.levels.size() == 8);
  for (const auto& lv : slice.levels) {
    REQUIRE(std::abs(lv.energy.imag()) < 1e-8);
    REQUIRE(lv.energy.real() > 0.0);
  }
}

TEST_CASE("shooting reproduces the harmonic ground state", "[spectral]") {
  cplx e = shooting_eigenvalue(PotentialSpec::harmonic(), cplx(1.1));
  REQUIRE(std::abs(e - cplx(1.0)) < 1e-10);
}

TEST_CASE("shooting agrees with the Galerkin solve on K(0)", "[spectral]") {
  cplx shot = shooting_eigenvalue(PotentialSpec::scaled_k(0.0), cplx(1.2));
  auto slice = stabilized_spectrum(PotentialSpec::scaled_k(0.0), 1);
  REQUIRE(std::abs(shot - slice.levels[0].energy) <
          1e-8 * std::max(1.0, std::abs(shot)));
}

TEST_CASE("shooting finds the tabulated contact level", "[spectral]") {
  cplx e = shooting_eigenvalue(PotentialSpec::semiclassical_h(0.0558),
                               cplx(0.352));
  REQUIRE(std::abs(e - cplx(0.35200)) < 5e-3);
}

TEST_CASE("energy scaling identity between representations", "[spectral]") {
  for (double h : {0.5, 1.0, 2.0}) {
    auto direct = stabilized_spectrum(PotentialSpec::semiclassical_h(h), 6);
    auto scaled =
        stabilized_spectrum(PotentialSpec::scaled_k(to_alpha(h)), 6);
    for (int m = 0; m < 6; ++m) {
      cplx lhs = direct.levels[m].energy;
      cplx rhs = scale_energy_k_to_h(h, scaled.levels[m].energy);
      REQUIRE(std::abs(lhs - rhs) < 1e-8);
    }
  }
}

TEST_CASE("conjugate pairing below the crossings", "[spectral]") {
  auto slice = stabilized_spectrum(PotentialSpec::semiclassical_h(0.02), 6);
  std::vector<bool> used(slice.levels.size(), false);
  int pairs = 0;
  for (std::size_t i = 0; i < slice.levels.size(); ++i) {
    if (used[i]) continue;
    cplx e = slice.levels[i].energy;
    if (std::abs(e.imag()) < 1e-8) continue;
    for (std::size_t j = i + 1; j < slice.levels.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(slice.levels[j].energy - std::conj(e)) < 1e-8) {
        used[i] = used[j] = true;
        ++pairs;
        break;
      }
    }
  }
  REQUIRE(pairs >= 2);
}

TEST_CASE("stabilized energies are robust under a scale change",
          "[spectral]") {
  auto spec = PotentialSpec::scaled_k(-1.0);
  auto base = stabilized_spectrum(spec, 4);
  StabilizeOptions opts;
  opts.hint = GalerkinConfig{base.config.basis_size / 2,
                             base.config.scale * 1.2, spec};
  opts.tune_scale = false;
  auto moved = stabilized_spectrum(spec, 4, opts);
  for (int m = 0; m < 4; ++m)
    REQUIRE(std::abs(base.levels[m].energy - moved.levels[m].energy) < 1e-8);
}
