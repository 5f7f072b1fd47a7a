#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "nelson/classical_energy.hpp"
#include "oracles.hpp"

using namespace nelson;

TEST_CASE("energy of the zero state and of the decoupled model") {
  const Discretization disc = fixtures::model(8, 4, 0.5);
  const EnergyBreakdown e = evaluate_h(disc, zero_state(disc));
  CHECK(e.total == 0.0);
  CHECK(e.h_interaction == 0.0);

  const Discretization free = fixtures::model(8, 4, 0.0);
  std::mt19937_64 rng(1);
  const FieldState z = random_state(free, rng, 1.0, 0.7);
  const EnergyBreakdown f = evaluate_h(free, z);
  CHECK(f.h_interaction == 0.0);
  CHECK(f.total == doctest::Approx(f.h0_nucleon + f.h0_meson));
}

TEST_CASE("energy agrees with the scalar double sum") {
  const Discretization disc = fixtures::model(8, 4, 0.7);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const FieldState z = random_state(disc, rng, 1.3, 0.6);
    const EnergyBreakdown e = evaluate_h(disc, z);
    CHECK(e.total == doctest::Approx(oracles::classical_energy(disc, z)).epsilon(1e-12));
    CHECK(e.h0_nucleon >= 0.0);
    CHECK(e.h0_meson >= 0.0);
  }
}

TEST_CASE("energy scaling law and gauge invariance") {
  const Discretization disc = fixtures::model(8, 4, 0.7);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const FieldState z = random_state(disc, rng, 0.9, 0.4);
    const EnergyBreakdown e = evaluate_h(disc, z);
    const EnergyBreakdown e2 = evaluate_h(disc, Complex(2.0) * z);
    CHECK(e2.total == doctest::Approx(4.0 * (e.h0_nucleon + e.h0_meson) + 8.0 * e.h_interaction).epsilon(1e-12));
    const FieldState rotated{std::exp(kI * 0.77) * z.z1, z.z2};
    CHECK(evaluate_h(disc, rotated).total == doctest::Approx(e.total).epsilon(1e-13));
  }
}

TEST_CASE("interaction energy bound") {
  const Discretization disc = fixtures::model(8, 4, 0.9);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> r(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = r(rng), b = r(rng);
    const FieldState z = random_state(disc, rng, a, b);
    CHECK(std::abs(evaluate_h(disc, z).h_interaction) <= 2.0 * a * a * disc.chi_over_sqrt_omega_norm() * b + 1e-14);
  }
}

TEST_CASE("meson elimination") {
  const Discretization disc = fixtures::model(8, 4, 0.8);
  std::mt19937_64 rng(5);
  CHECK(eliminate_meson(disc, CVector::Zero(8)).norm() == 0.0);
  const Discretization free = fixtures::model(8, 4, 0.0);
  CHECK(eliminate_meson(free, random_vector(8, rng)).norm() == 0.0);

  const CVector z1 = random_vector(8, rng);
  const FieldState star{z1, eliminate_meson(disc, z1)};
  const double best = evaluate_h(disc, star).total;
  CHECK(meson_gradient(disc, star).norm() <= 1e-10);
  for (int trial = 0; trial < 100; ++trial) {
    const FieldState other{z1, star.z2 + 0.3 * random_vector(disc.modes(), rng)};
    CHECK(evaluate_h(disc, other).total >= best);
  }
}

TEST_CASE("reduced functional equals h at the eliminated meson") {
  const Discretization disc = fixtures::model(8, 4, 0.8);
  std::mt19937_64 rng(6);
  CHECK(reduced_functional(disc, CVector::Zero(8)) == 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const CVector z1 = random_vector(8, rng);
    const double direct = evaluate_h(disc, {z1, eliminate_meson(disc, z1)}).total;
    CHECK(std::abs(reduced_functional(disc, z1) - direct) <= 1e-12 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("reduced functional respects the lower bound on the sphere") {
  const Discretization disc = fixtures::model(8, 4, 2.0);
  std::mt19937_64 rng(7);
  const double bound = energy_lower_bound(disc);
  CHECK(bound < 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    const CVector z1 = random_state(disc, rng, disc.charge(), 0.0).z1;
    CHECK(reduced_functional(disc, z1) >= bound);
  }
}

TEST_CASE("reduced gradient matches central differences") {
  const Discretization disc = fixtures::model(8, 4, 1.2);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const CVector z1 = random_vector(8, rng);
    const CVector v = random_vector(8, rng);
    const double h = 1e-6;
    const double fd = (reduced_functional(disc, z1 + h * v) - reduced_functional(disc, z1 - h * v)) / (2.0 * h);
    const double an = disc.dx() * reduced_gradient(disc, z1).dot(v).real();
    CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("decoupled minimizer is the one-body ground state") {
  fixtures::ModelSpec spec;
  spec.chi_scale = 0.0;
  spec.charge = 1.5;
  const Discretization disc = fixtures::model(spec);
  const MinimizationResult r = minimize_constrained(disc, {});
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.25 * disc.one_body_eigenvalues()[0]).epsilon(1e-10));
  const CVector ground = disc.one_body_eigenvectors().col(0);
  const double overlap = std::abs(ground.dot(r.minimizer.z1)) * std::sqrt(disc.dx()) / 1.5;
  CHECK(overlap == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("minimizer invariants") {
  const Discretization disc = fixtures::model(8, 4, 1.5);
  const MinimizationResult r = minimize_constrained(disc, {});
  CHECK(r.converged);
  CHECK(r.grad_norm <= 1e-8);
  CHECK(nucleon_norm(disc, r.minimizer.z1) == doctest::Approx(disc.charge()).epsilon(1e-10));
  CHECK(r.value >= r.lower_bound);
  CHECK(std::abs(r.minimizer.z1.sum().imag()) <= 1e-12);
  CHECK(r.minimizer.z1.sum().real() >= 0.0);
  CHECK(evaluate_h(disc, r.minimizer).total == doctest::Approx(r.value).epsilon(1e-12));
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    CHECK(r.history[i] >= r.lower_bound);
    if (i > 0) CHECK(r.history[i] <= r.history[i - 1] + 1e-14);
  }
}

TEST_CASE("minimizer agrees with the brute-force mesh on a tiny grid") {
  const Discretization disc = fixtures::model(4, 2, 1.5);
  const MinimizationResult r = minimize_constrained(disc, {});
  const double mesh = oracles::mesh_minimum(disc);
  CHECK(std::abs(r.value - mesh) <= 1e-4);
  CHECK(r.value <= mesh + 1e-10);
}

TEST_CASE("a supplied seed runs a single descent") {
  const Discretization disc = fixtures::model(8, 4, 0.5);
  std::mt19937_64 rng(9);
  const MinimizationResult r = minimize_constrained(disc, {}, random_vector(8, rng));
  CHECK(r.start_index == 0);
  CHECK(r.converged);
}

TEST_CASE("iteration cap is flagged") {
  const Discretization disc = fixtures::model(8, 4, 0.5);
  MinimizationOptions opts;
  opts.max_iterations = 2;
  const MinimizationResult r = minimize_constrained(disc, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 2);
}
