#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"

using namespace nelson;

namespace {

ModelParams flat_params(const Grid& grid, double chi, double m0) {
  ModelParams p;
  p.meson_mass = m0;
  p.cutoff = RVector::Constant(grid.sites(), chi);
  p.potential = RVector::Zero(grid.sites());
  return p;
}

}  // namespace

TEST_CASE("dispersion") {
  CHECK(dispersion(0.0, 1.0) == 1.0);
  CHECK(dispersion(3.0, 0.0) == 3.0);
  CHECK(dispersion(3.0, 4.0) == 5.0);
}

TEST_CASE("grid geometry") {
  const Grid grid(3.0, 12);
  CHECK(grid.dx() * grid.sites() == doctest::Approx(6.0));
  CHECK(grid.dx() * grid.dk() == doctest::Approx(2.0 * std::numbers::pi / 12));
  CHECK(grid.site(0) == -3.0);
  CHECK(grid.mode(6) == 0.0);
  for (int m = 1; m < grid.sites(); ++m) CHECK(grid.mode(grid.mirror_mode(m)) == doctest::Approx(-grid.mode(m)));
  CHECK_THROWS_AS(Grid(1.0, 5), ConfigInvalid);
  CHECK_THROWS_AS(Grid(1.0, 2), ConfigInvalid);
  CHECK_THROWS_AS(Grid(0.0, 8), ConfigInvalid);
}

TEST_CASE("centered mode block") {
  const Grid grid(4.0, 8);
  CHECK(centered_modes(grid, 4) == std::vector<int>{2, 3, 4, 5});
  CHECK(centered_modes(grid, 3) == std::vector<int>{3, 4, 5});
  CHECK(centered_modes(grid, 1) == std::vector<int>{4});
  CHECK_THROWS_AS(centered_modes(grid, 9), ConfigInvalid);
}

TEST_CASE("form factor vanishes without coupling") {
  const Grid grid(4.0, 8);
  CHECK(coupling_form_factor(grid, flat_params(grid, 0.0, 1.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("form factor of the zero mode with unit weights is one") {
  const Grid grid(std::numbers::pi, 8);
  REQUIRE(grid.dk() == doctest::Approx(1.0));
  ModelParams p = flat_params(grid, 0.0, 1.0);
  p.cutoff[4] = 1.0;
  const CMatrix g = coupling_form_factor(grid, p);
  for (int j = 0; j < 8; ++j) CHECK(std::abs(g(4, j) - 1.0) <= 1e-15);
}

TEST_CASE("form factor agrees with scalar evaluation") {
  const Grid grid(std::numbers::pi, 8);
  const ModelParams p = flat_params(grid, 1.0, 1.0);
  const CMatrix g = coupling_form_factor(grid, p);
  for (int m = 0; m < 8; ++m) {
    const double k = (m - 4) * 1.0;
    const double w = std::sqrt(k * k + 1.0);
    for (int j = 0; j < 8; ++j) {
      const double x = -std::numbers::pi + j * std::numbers::pi / 4.0;
      const std::complex<double> expect = std::polar(1.0 / std::sqrt(w), -k * x);
      CHECK(std::abs(g(m, j) - expect) <= 1e-14);
      CHECK(std::abs(g(m, j)) == doctest::Approx(std::abs(g(m, 0))));
    }
  }
}

TEST_CASE("form factor is conjugate under mode reflection for even cutoffs") {
  const Grid grid(4.0, 8);
  ModelParams p = flat_params(grid, 0.0, 1.0);
  p.cutoff = gaussian_cutoff(grid, 1.0, 1.0);
  const CMatrix g = coupling_form_factor(grid, p);
  for (int m = 1; m < 8; ++m) {
    for (int j = 0; j < 8; ++j) CHECK(std::abs(g(grid.mirror_mode(m), j) - std::conj(g(m, j))) <= 1e-15);
  }
}

TEST_CASE("massless meson needs a vanishing cutoff at k = 0") {
  const Grid grid(4.0, 8);
  CHECK_THROWS_AS(coupling_form_factor(grid, flat_params(grid, 1.0, 0.0)), DegenerateDispersion);
  ModelParams ok = flat_params(grid, 1.0, 0.0);
  ok.cutoff[4] = 0.0;
  CHECK_NOTHROW(coupling_form_factor(grid, ok));
  CHECK_THROWS_AS(Discretization(grid, flat_params(grid, 1.0, 0.0), centered_modes(grid, 4)), DegenerateDispersion);
}

TEST_CASE("negative potential is rejected") {
  const Grid grid(4.0, 8);
  ModelParams p = flat_params(grid, 0.0, 1.0);
  p.potential[3] = -0.1;
  CHECK_THROWS_AS(Discretization(grid, p, centered_modes(grid, 2)), ConfigInvalid);
}

TEST_CASE("one-body operator is Hermitian and positive") {
  const Discretization disc = fixtures::model(8, 4, 0.5);
  const CMatrix& a = disc.one_body();
  CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
  CHECK(disc.one_body_eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("free kinetic operator is diagonal on plane waves") {
  const Grid grid(3.0, 12);
  ModelParams p = flat_params(grid, 0.0, 1.0);
  p.nucleon_mass = 0.7;
  const CMatrix a = one_body_hamiltonian(grid, p);
  CVector ones = CVector::Ones(12);
  CHECK((a * ones).norm() <= 1e-12);
  for (int m = 0; m < 12; ++m) {
    CVector wave(12);
    for (int j = 0; j < 12; ++j) wave[j] = std::exp(kI * grid.mode(m) * grid.site(j));
    const double e = grid.mode(m) * grid.mode(m) / (2.0 * p.nucleon_mass);
    CHECK((a * wave - e * wave).norm() <= 1e-11 * (1.0 + e));
  }
}

TEST_CASE("harmonic trap ground energy on a fine grid") {
  const Grid grid(10.0, 128);
  ModelParams p = flat_params(grid, 0.0, 1.0);
  p.nucleon_mass = 0.5;
  p.potential = harmonic_potential(grid, 1.0);
  const Discretization disc(grid, p, centered_modes(grid, 1));
  CHECK(std::abs(disc.one_body_eigenvalues()[0] - 1.0) <= 1e-6);
}

TEST_CASE("spectral transform round trip and Parseval") {
  const Grid grid(2.5, 16);
  const SpectralTransform ft(grid);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const CVector u = random_vector(16, rng);
    CHECK((ft.inverse(ft.forward(u)) - u).norm() <= 1e-12 * u.norm());
    CHECK(ft.forward(u).norm() == doctest::Approx(u.norm()).epsilon(1e-12));
    const CVector p = ft.to_momentum(u);
    CHECK(std::sqrt(grid.dk()) * p.norm() == doctest::Approx(std::sqrt(grid.dx()) * u.norm()).epsilon(1e-12));
    CHECK((ft.from_momentum(p) - u).norm() <= 1e-12 * u.norm());
  }
}

TEST_CASE("forward transform matches the direct sum") {
  const Grid grid(2.0, 8);
  const SpectralTransform ft(grid);
  std::mt19937_64 rng(4);
  const CVector u = random_vector(8, rng);
  const CVector f = ft.forward(u);
  for (int m = 0; m < 8; ++m) {
    Complex s = 0.0;
    for (int j = 0; j < 8; ++j) s += std::exp(-kI * grid.mode(m) * grid.site(j)) * u[j];
    CHECK(std::abs(f[m] - s / std::sqrt(8.0)) <= 1e-12);
  }
}

TEST_CASE("cutoff presets zero the unpaired mode") {
  const Grid grid(4.0, 8);
  CHECK(gaussian_cutoff(grid, 1.0, 2.0)[0] == 0.0);
  CHECK(sharp_cutoff(grid, 100.0, 2.0)[0] == 0.0);
  const RVector s = sharp_cutoff(grid, 1.0, 2.0);
  for (int m = 1; m < 8; ++m) CHECK(s[m] == (std::abs(grid.mode(m)) <= 1.0 ? 2.0 : 0.0));
}

TEST_CASE("derived norms") {
  const Discretization disc = fixtures::model(8, 4, 0.5);
  double a = 0.0, b = 0.0;
  for (int m = 0; m < disc.modes(); ++m) {
    a += disc.dk() * disc.chi()[m] * disc.chi()[m] / disc.omega()[m];
    b += disc.dk() * std::pow(disc.chi()[m] / disc.omega()[m], 2);
  }
  CHECK(disc.chi_over_sqrt_omega_norm() == doctest::Approx(std::sqrt(a)));
  CHECK(disc.chi_over_omega_norm() == doctest::Approx(std::sqrt(b)));
  const CMatrix u = disc.one_body_propagator(0.4);
  CHECK((u * u.adjoint() - CMatrix::Identity(8, 8)).norm() <= 1e-12);
}
