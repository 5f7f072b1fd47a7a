#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "nelson/classical_dynamics.hpp"
#include "nelson/classical_energy.hpp"
#include "nelson/quantum_dynamics.hpp"

using namespace nelson;
using fixtures::sector_space;
using fixtures::truncated_space;

namespace {

QuantumState random_quantum_state(const SpacePtr& space, double eps, std::mt19937_64& rng) {
  QuantumState s;
  s.space = space;
  s.eps = eps;
  s.amplitudes = random_vector(space->dimension(), rng);
  s.amplitudes /= s.amplitudes.norm();
  return s;
}

}  // namespace

TEST_CASE("decoupled single nucleon has energy eps times the one-body ground energy") {
  const Discretization disc = fixtures::model(8, 4, 0.0);
  const double eps = 0.3;
  const HamiltonianSet hs = assemble(disc, sector_space(disc, 1, 0), eps);
  const CMatrix h = hs.h.dense();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CHECK(es.eigenvalues()[0] == doctest::Approx(eps * disc.one_body_eigenvalues()[0]).epsilon(1e-12));
}

TEST_CASE("assembled operators are Hermitian and H0 is positive") {
  const Discretization disc = fixtures::model(4, 2, 0.8);
  const HamiltonianSet hs = assemble(disc, truncated_space(disc, 2, 3), 0.5);
  for (const TensorOperator* op : {&hs.h0, &hs.hi, &hs.h}) {
    const CMatrix m = op->dense();
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hs.h0.dense());
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  const CMatrix g = hs.generator.dense() * hs.eps;
  CHECK((g - hs.h.dense()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("coherent energy on a sector equals the classical functional") {
  const Discretization disc = fixtures::model(8, 4, 0.6);
  std::mt19937_64 rng(101);
  for (int n = 1; n <= 3; ++n) {
    const double eps = 1.0 / n;
    const SpacePtr space = sector_space(disc, n, 7);
    const HamiltonianSet hs = assemble(disc, space, eps);
    for (int trial = 0; trial < 4; ++trial) {
      const FieldState z = random_state(disc, rng, 1.0, 0.25);
      const QuantumState c = coherent_state(disc, space, z, eps);
      const double quantum = c.amplitudes.dot(hs.h.apply(c.amplitudes)).real();
      const double classical = evaluate_h(disc, z).total;
      CHECK(std::abs(quantum - classical) <= 1e-5 * (1.0 + std::abs(classical)));
    }
  }
}

TEST_CASE("full coherent state on truncated nucleons reproduces h(z)") {
  const Discretization disc = fixtures::model(4, 2, 0.9);
  std::mt19937_64 rng(7);
  const double eps = 0.2;
  const SpacePtr space = truncated_space(disc, 9, 9);
  const HamiltonianSet hs = assemble(disc, space, eps);
  const FieldState z = random_state(disc, rng, 0.4, 0.3);
  const QuantumState c = coherent_state(disc, space, z, eps);
  const double quantum = c.amplitudes.dot(hs.h.apply(c.amplitudes)).real();
  CHECK(fixtures::relative(quantum, evaluate_h(disc, z).total) <= 1e-5);
}

TEST_CASE("Krylov propagation matches the dense exponential and conserves norm and energy") {
  const Discretization disc = fixtures::model(4, 2, 0.8);
  std::mt19937_64 rng(3);
  const double eps = 0.25;
  const HamiltonianSet hs = assemble(disc, truncated_space(disc, 3, 3), eps);
  REQUIRE(hs.space->dimension() <= 500);
  const QuantumState s0 = random_quantum_state(hs.space, eps, rng);
  const double t = 0.7;
  const QuantumState st = propagate(s0, hs, t);
  const CVector dense = dense_propagator(hs.generator.dense(), t) * s0.amplitudes;
  CHECK((st.amplitudes - dense).norm() <= 1e-9);
  CHECK(std::abs(st.amplitudes.norm() - 1.0) <= 1e-10);
  const double e0 = s0.amplitudes.dot(hs.h.apply(s0.amplitudes)).real();
  const double e1 = st.amplitudes.dot(hs.h.apply(st.amplitudes)).real();
  CHECK(std::abs(e1 - e0) <= 1e-9 * std::max(1.0, std::abs(e0)));
  CHECK((propagate(s0, hs, 0.0).amplitudes - s0.amplitudes).norm() <= 1e-14);
}

TEST_CASE("eigenvectors only pick up a phase") {
  const Discretization disc = fixtures::model(4, 2, 0.8);
  const double eps = 0.5;
  const HamiltonianSet hs = assemble(disc, sector_space(disc, 2, 3), eps);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hs.h.dense());
  QuantumState s{hs.space, es.eigenvectors().col(0), eps, 0.0};
  const QuantumState st = propagate(s, hs, 1.3);
  CHECK(std::abs(std::abs(s.amplitudes.dot(st.amplitudes)) - 1.0) <= 1e-10);
  const Complex phase = std::exp(-kI * 1.3 * es.eigenvalues()[0] / eps);
  CHECK((st.amplitudes - phase * s.amplitudes).norm() <= 1e-9);
}

TEST_CASE("number of nucleons is conserved on a sector") {
  const Discretization disc = fixtures::model(8, 4, 0.8);
  const double eps = 0.5;
  const SpacePtr space = sector_space(disc, 2, 3);
  const HamiltonianSet hs = assemble(disc, space, eps);
  std::mt19937_64 rng(5);
  const QuantumState st = propagate(random_quantum_state(space, eps, rng), hs, 1.0);
  CHECK(std::abs(st.amplitudes.norm() - 1.0) <= 1e-10);
}

TEST_CASE("interaction picture undoes a free evolution") {
  const Discretization disc = fixtures::model(4, 2, 0.0);
  std::mt19937_64 rng(9);
  const double eps = 0.3;
  const HamiltonianSet hs = assemble(disc, truncated_space(disc, 3, 3), eps);
  const QuantumState s0 = random_quantum_state(hs.space, eps, rng);
  const QuantumState back = interaction_picture(propagate(s0, hs, 0.9), hs, 0.9);
  CHECK(std::abs(std::abs(back.amplitudes.dot(s0.amplitudes)) - 1.0) <= 1e-9);
  CHECK((interaction_picture(s0, hs, 0.0).amplitudes - s0.amplitudes).norm() <= 1e-14);
}

TEST_CASE("interaction picture moves the Weyl argument along the free flow") {
  const Discretization disc = fixtures::model(4, 2, 0.7);
  std::mt19937_64 rng(21);
  const double eps = 0.3;
  const HamiltonianSet hs = assemble(disc, truncated_space(disc, 3, 4), eps);
  const QuantumState s0 = random_quantum_state(hs.space, eps, rng);
  const double t = 0.6;
  const QuantumState st = propagate(s0, hs, t);
  const QuantumState tilde = interaction_picture(st, hs, t);
  const FieldState xi = random_state(disc, rng, 0.3, 0.3);
  // Compressed Weyl operators commute with the truncated free evolution up
  // to the truncation of the free flow, which is exact here because H0
  // preserves both occupation totals.
  const Complex lhs = weyl(disc, hs.space, xi, eps).expectation(tilde.amplitudes);
  const Complex rhs = weyl(disc, hs.space, free_flow(disc, xi, t), eps).expectation(st.amplitudes);
  CHECK(std::abs(lhs - rhs) <= 1e-8);
}

TEST_CASE("B operators vanish for zero argument or zero coupling") {
  std::mt19937_64 rng(4);
  {
    const Discretization disc = fixtures::model(4, 2, 0.7);
    const SpacePtr space = truncated_space(disc, 2, 2);
    const BOperators b = b_operators(disc, space, zero_state(disc), 0.4);
    CHECK(b.b0.dense().cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.b1.dense().cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.b2 == Complex(0.0));
  }
  {
    const Discretization disc = fixtures::model(4, 2, 0.0);
    const SpacePtr space = truncated_space(disc, 2, 2);
    const BOperators b = b_operators(disc, space, random_state(disc, rng, 0.5, 0.5), 0.4);
    CHECK(b.b0.dense().cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(b.b1.dense().cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(b.b2) <= 1e-15);
  }
}

TEST_CASE("B2 is purely imaginary") {
  const Discretization disc = fixtures::model(4, 2, 0.7);
  std::mt19937_64 rng(8);
  const SpacePtr space = truncated_space(disc, 1, 1);
  const BOperators b = b_operators(disc, space, random_state(disc, rng, 0.6, 0.6), 0.4);
  CHECK(std::abs(b.b2.real()) <= 1e-15);
}

TEST_CASE("Duhamel expansion with B operators closes") {
  const Discretization disc = fixtures::model(4, 2, 0.8);
  std::mt19937_64 rng(31);
  const double eps = 0.25;
  // H_I conserves nucleon number, so leakage runs only through the top
  // meson shell; the budget goes to the meson cap.
  const HamiltonianSet hs = assemble(disc, truncated_space(disc, 2, 6), eps);
  REQUIRE(hs.space->dimension() <= 500);
  const QuantumState c = coherent_state(disc, hs.space, random_state(disc, rng, 0.2, 0.2), eps, 1e-2);
  const FieldState xi = random_state(disc, rng, 0.3, 0.3);
  const DuhamelReport rep = duhamel_check(disc, hs, c, xi, 0.5, 65);
  CHECK(rep.residual <= rep.quadrature_error + 1e-7);
  CHECK(rep.residual <= 1e-6);
  CHECK(std::abs(rep.leading) > 1e-4);
}

TEST_CASE("Duhamel check is trivial for zero argument and zero coupling") {
  std::mt19937_64 rng(2);
  {
    const Discretization disc = fixtures::model(4, 2, 0.8);
    const HamiltonianSet hs = assemble(disc, truncated_space(disc, 2, 3), 0.3);
    const QuantumState s = random_quantum_state(hs.space, 0.3, rng);
    const DuhamelReport rep = duhamel_check(disc, hs, s, zero_state(disc), 0.5, 17);
    CHECK(std::abs(rep.lhs - 1.0) <= 1e-12);
    CHECK(std::abs(rep.rhs - 1.0) <= 1e-12);
  }
  {
    const Discretization disc = fixtures::model(4, 2, 0.0);
    const HamiltonianSet hs = assemble(disc, truncated_space(disc, 2, 3), 0.3);
    const QuantumState s = random_quantum_state(hs.space, 0.3, rng);
    const FieldState xi = random_state(disc, rng, 0.3, 0.3);
    const DuhamelReport rep = duhamel_check(disc, hs, s, xi, 0.5, 17);
    CHECK(std::abs(rep.lhs - weyl(disc, hs.space, xi, 0.3).expectation(s.amplitudes)) <= 1e-10);
    CHECK(std::abs(rep.leading) <= 1e-14);
  }
}

TEST_CASE("Gronwall bound holds and is sharp at delta zero") {
  const Discretization disc = fixtures::model(4, 2, 0.5);
  const HamiltonianSet hs = assemble(disc, sector_space(disc, 2, 6), 0.5);
  const GronwallReport zero = gronwall_bound_check(disc, hs, 0.0, 1.0, 50);
  CHECK(zero.lhs_norm == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(zero.bound == doctest::Approx(1.0));
  const GronwallReport one = gronwall_bound_check(disc, hs, 1.0, 1.0, 200);
  CHECK(one.ratio <= 1.01);
  CHECK(one.sampled_ratio <= one.ratio + 1e-9);
}

TEST_CASE("decoupled Gronwall left side is one") {
  const Discretization disc = fixtures::model(4, 2, 0.0);
  const HamiltonianSet hs = assemble(disc, sector_space(disc, 2, 4), 0.5);
  const GronwallReport r = gronwall_bound_check(disc, hs, 1.0, 1.0, 20);
  CHECK(r.lhs_norm == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.bound >= 1.0);
}
