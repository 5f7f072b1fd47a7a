// Acceptance run: one PASS/FAIL line per criterion with pinned tolerances.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "nelson/classical_dynamics.hpp"
#include "nelson/classical_energy.hpp"
#include "nelson/ground_state.hpp"
#include "nelson/limit_harness.hpp"
#include "nelson/linalg.hpp"
#include "nelson/operator_checks.hpp"
#include "nelson/quantum_dynamics.hpp"
#include "oracles.hpp"

using namespace nelson;
using fixtures::sector_space;
using fixtures::truncated_space;

namespace {

struct Line {
  std::string label;
  double value;
  double limit;
  bool pass;
};

struct Outcome {
  bool pass = true;
  std::vector<Line> lines;

  void at_most(const std::string& label, double value, double limit) {
    lines.push_back({label, value, limit, value <= limit});
    pass = pass && value <= limit;
  }
  void within(const std::string& label, double value, double lo, double hi) {
    const bool ok = value >= lo && value <= hi;
    lines.push_back({label + " in [" + std::to_string(lo).substr(0, 4) + ", " + std::to_string(hi).substr(0, 4) + "]",
                     value, hi, ok});
    pass = pass && ok;
  }
  void holds(const std::string& label, bool ok) {
    lines.push_back({label, ok ? 1.0 : 0.0, 1.0, ok});
    pass = pass && ok;
  }
};

MatVec dense_matvec(const CMatrix& h) {
  return [&h](const CVector& x, CVector& y) { y.noalias() = h * x; };
}

CMatrix random_hermitian(Index n, std::mt19937_64& rng) {
  CMatrix a(n, n);
  for (Index j = 0; j < n; ++j) a.col(j) = random_vector(n, rng);
  return 0.5 * (a + a.adjoint());
}

QuantumState random_quantum_state(const SpacePtr& space, double eps, std::mt19937_64& rng) {
  QuantumState s;
  s.space = space;
  s.eps = eps;
  s.amplitudes = random_vector(space->dimension(), rng);
  s.amplitudes /= s.amplitudes.norm();
  return s;
}

double expectation(const TensorOperator& op, const CVector& v) { return v.dot(op.apply(v)).real(); }

double relative(double drift, double reference) { return drift / std::max(1e-300, std::abs(reference)); }

// Production model for the ground state and classical checks.
Discretization production_model(double chi_scale) {
  fixtures::ModelSpec s;
  s.chi_scale = chi_scale;
  return fixtures::model(s);
}

Outcome coherent_energy_identity() {
  Outcome o;
  const Discretization disc = production_model(0.5);
  std::mt19937_64 rng(101);
  double worst = 0.0, worst_deficit = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const double eps = 1.0 / n;
    for (int trial = 0; trial < 20; ++trial) {
      const FieldState z = random_state(disc, rng, disc.charge(), 0.3);
      const int cap = poisson_cap(std::pow(meson_norm(disc, z.z2), 2) / eps, 1e-7);
      const HamiltonianSet hs = assemble(disc, sector_space(disc, n, cap), eps);
      const CoherentEnergy ce = coherent_upper_bound(disc, hs, z, 1e-6);
      const double h = evaluate_h(disc, z).total;
      worst = std::max(worst, std::abs(ce.value - h) / (1.0 + std::abs(h)));
      worst_deficit = std::max(worst_deficit, ce.deficit);
    }
  }
  o.at_most("max |<C,HC> - h| / (1 + |h|) over 60 states", worst, 1e-5);
  o.at_most("max coherent truncation deficit", worst_deficit, 1e-6);
  return o;
}

Outcome conservation() {
  Outcome o;
  const Discretization disc = production_model(0.5);
  std::mt19937_64 rng(17);
  FlowOptions f;
  f.dt = 1e-3;
  f.record_every = 10;
  double charge = 0.0, energy = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const FieldState z0 = random_state(disc, rng, disc.charge(), 0.5);
    const Trajectory t = flow(disc, z0, 0.0, 5.0, f);
    for (std::size_t i = 0; i < t.times.size(); ++i) {
      charge = std::max(charge, relative(std::abs(t.charge_log[i] - t.charge_log[0]), t.charge_log[0]));
      energy = std::max(energy, relative(std::abs(t.energy_log[i] - t.energy_log[0]), t.energy_log[0]));
    }
  }
  o.at_most("classical relative charge drift on [0,5]", charge, 1e-8);
  o.at_most("classical relative energy drift on [0,5]", energy, 1e-6);

  const Discretization small = fixtures::model(4, 2, 0.8);
  double norm_drift = 0.0, energy_drift = 0.0;
  for (double eps : {0.5, 0.25}) {
    const HamiltonianSet hs = assemble(small, truncated_space(small, 3, 3), eps);
    const QuantumState s0 = random_quantum_state(hs.space, eps, rng);
    const double e0 = expectation(hs.h, s0.amplitudes);
    for (double t : {0.5, 2.0, 5.0}) {
      const QuantumState st = propagate(s0, hs, t);
      norm_drift = std::max(norm_drift, std::abs(st.amplitudes.norm() - 1.0));
      energy_drift = std::max(energy_drift, relative(std::abs(expectation(hs.h, st.amplitudes) - e0), e0));
    }
  }
  o.at_most("quantum norm drift", norm_drift, 1e-10);
  o.at_most("quantum relative energy drift", energy_drift, 1e-9);
  return o;
}

Outcome duhamel() {
  Outcome o;
  const Discretization disc = fixtures::model(4, 2, 0.8);
  const double eps = 0.25;
  std::mt19937_64 rng(7);
  const HamiltonianSet hs = assemble(disc, truncated_space(disc, 2, 6), eps);
  const FieldState z0 = random_state(disc, rng, 0.2, 0.2);
  const QuantumState initial = coherent_state(disc, hs.space, z0, eps, 1.0);
  double worst = 0.0;
  for (const FieldState& xi : default_xi_panel(disc, 6, 0.3, 8)) {
    for (double t : {0.25, 0.5}) worst = std::max(worst, duhamel_check(disc, hs, initial, xi, t, 65).residual);
  }
  o.at_most("Duhamel residual, dimension " + std::to_string(hs.space->dimension()), worst, 1e-6);

  double expansion = 0.0;
  for (double e : {0.5, 0.2}) {
    for (int k = 0; k < 3; ++k) {
      const FieldState xi = random_state(disc, rng, 0.4, 0.4);
      const InteractionConjugation ic = weyl_interaction_residuals(disc, 2, 3, 10, xi, e);
      expansion = std::max(expansion, ic.expansion_residual);
    }
  }
  o.at_most("eps expansion of the conjugated interaction", expansion, 1e-8);
  return o;
}

Outcome inequalities() {
  Outcome o;
  const Discretization disc = fixtures::model(4, 2, 0.8);
  BoundOptions bo;
  bo.nucleons = 2;
  bo.meson_cap = 4;
  bo.samples = 500;
  for (double eps : {0.5, 0.2}) {
    for (const BoundCheck& b : check_relative_bounds(disc, eps, bo)) {
      o.at_most(b.name + " ratio, eps " + std::to_string(eps).substr(0, 3), b.max_ratio, 1.0 + 1e-9);
    }
  }
  const HamiltonianSet hs = assemble(disc, sector_space(disc, 2, 6), 0.5);
  for (double delta : {0.5, 1.0}) {
    const GronwallReport g = gronwall_bound_check(disc, hs, delta, 1.0, 500, 5);
    o.at_most("Gronwall ratio, delta " + std::to_string(delta).substr(0, 3), std::max(g.ratio, g.sampled_ratio), 1.01);
  }
  return o;
}

Outcome weyl_identities() {
  Outcome o;
  const Discretization disc = fixtures::model(4, 2, 0.8);
  std::mt19937_64 rng(12);
  double dgamma = 0.0, shifted = 0.0;
  for (int k = 0; k < 5; ++k) {
    const bool meson = k % 2 == 0;
    const int modes = meson ? 2 : 3;
    const CVector xi = 0.4 * random_vector(modes, rng);
    CMatrix b(modes, modes);
    for (int j = 0; j < modes; ++j) b.col(j) = random_vector(modes, rng);
    const CMatrix y = b.adjoint() * b;
    dgamma = std::max(dgamma, weyl_dgamma_residual(meson ? BasisKind::meson_truncated : BasisKind::nucleon_truncated,
                                                   modes, meson ? 3 : 2, 12, xi, y, meson ? 0.5 : 1.0, 0.3));
    const FieldState zeta = random_state(disc, rng, 0.4, 0.4);
    shifted = std::max(shifted, weyl_interaction_residuals(disc, 2, 3, 10, zeta, 0.3).shifted_residual);
  }
  o.at_most("Weyl conjugation of dGamma(y), 5 pairs", dgamma, 1e-8);
  o.at_most("Weyl conjugation of the interaction, 5 arguments", shifted, 1e-8);
  return o;
}

Outcome ground_state_convergence() {
  Outcome o;
  GroundSweepOptions opts;
  opts.m_max = 2;
  const GroundSweepReport rep = ground_energy_sweep(production_model(0.175), opts);
  double sandwich = -1e300;
  for (const GroundStateRecord& g : rep.records) {
    std::printf("    n=%d eps=%.4f Eq=%.10f Ecoh=%.10f Ecl=%.10f |dE|=%.3e m_max=%d shift=%.1e\n", g.n, g.eps,
                g.e_quantum, g.e_coherent, g.e_classical, std::abs(g.e_quantum - g.e_classical), g.m_max,
                g.doubling_shift);
    sandwich = std::max(sandwich, g.e_quantum - g.e_coherent);
  }
  o.holds("|Eq - Ecl| nonincreasing for n >= 2", rep.gaps_nonincreasing);
  o.at_most("max Eq - Ecoh", sandwich, 1e-6);
  o.at_most("meson cap doubling shift", rep.max_doubling_shift, 1e-4);

  GroundSweepOptions control = opts;
  control.doubling_check = false;
  const GroundSweepReport free = ground_energy_sweep(production_model(0.0), control);
  double exact = 0.0;
  for (const GroundStateRecord& g : free.records) exact = std::max(exact, std::abs(g.e_quantum - g.e_classical));
  o.at_most("decoupled control |Eq - Ecl|", exact, 1e-9);
  return o;
}

Outcome characteristic_limit() {
  Outcome o;
  fixtures::ModelSpec s;
  s.sites = 4;
  s.modes = 2;
  s.half_length = 2.0;
  s.chi_scale = 1.0;
  const Discretization disc = fixtures::model(s);
  std::mt19937_64 rng(7);
  const FieldState z0 = random_state(disc, rng, 0.316, 0.316);
  const std::vector<FieldState> panel = default_xi_panel(disc, 6, 1.0, 8);
  LimitSweepOptions opts;
  opts.flow.record_every = 1 << 30;
  const LimitSweepReport rep = limit_sweep(disc, z0, panel, opts);
  for (std::size_t i = 0; i < rep.samples.size(); i += panel.size()) {
    double worst = 0.0;
    for (std::size_t x = 0; x < panel.size(); ++x) worst = std::max(worst, rep.samples[i + x].error);
    std::printf("    eps=%.3f t=%.2f max error %.4e\n", rep.samples[i].eps, rep.samples[i].t, worst);
  }
  o.holds("error strictly decreasing along eps for every (t, xi)", rep.monotone);
  o.at_most("terminal error at eps 0.05", rep.terminal_error, 0.1);

  s.chi_scale = 0.0;
  const LimitSweepReport free = limit_sweep(fixtures::model(s), z0, panel, opts);
  o.at_most("decoupled control spread across t", free.t_spread, 1e-6);
  return o;
}

Outcome minimizer() {
  Outcome o;
  const Discretization disc = fixtures::model(8, 4, 1.2);
  std::mt19937_64 rng(8);
  double gradient = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CVector z1 = random_vector(8, rng);
    const CVector v = random_vector(8, rng);
    const double h = 1e-6;
    const double fd = (reduced_functional(disc, z1 + h * v) - reduced_functional(disc, z1 - h * v)) / (2.0 * h);
    const double an = disc.dx() * reduced_gradient(disc, z1).dot(v).real();
    gradient = std::max(gradient, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  }
  o.at_most("gradient vs central differences", gradient, 1e-6);

  double margin = 1e300;
  for (double chi : {0.5, 1.2, 2.0}) {
    const MinimizationResult r = minimize_constrained(fixtures::model(8, 4, chi), {});
    for (double h : r.history) margin = std::min(margin, h - r.lower_bound);
  }
  o.lines.push_back({"min over iterates of h - lower bound (>= 0)", margin, 0.0, margin >= 0.0});
  o.pass = o.pass && margin >= 0.0;

  const Discretization tiny = fixtures::model(4, 2, 1.5);
  const double mesh = oracles::mesh_minimum(tiny);
  o.at_most("G=4, M=2 minimum vs brute-force mesh", std::abs(minimize_constrained(tiny, {}).value - mesh), 1e-4);
  return o;
}

Outcome oracles_agree() {
  Outcome o;
  std::mt19937_64 rng(3);
  double krylov = 0.0;
  for (Index n : {50, 200, 500}) {
    const CMatrix h = random_hermitian(n, rng) / std::sqrt(static_cast<double>(n));
    const CVector v = random_vector(n, rng);
    for (double t : {0.1, 1.0, -2.5}) {
      krylov = std::max(krylov, (expv(dense_matvec(h), v, t) - dense_propagator(h, t) * v).norm() / v.norm());
    }
  }
  const Discretization disc = fixtures::model(4, 2, 0.8);
  const HamiltonianSet hs = assemble(disc, truncated_space(disc, 3, 3), 0.25);
  const QuantumState s0 = random_quantum_state(hs.space, 0.25, rng);
  const CVector dense_state = dense_propagator(hs.generator.dense(), 0.7) * s0.amplitudes;
  krylov = std::max(krylov, (propagate(s0, hs, 0.7).amplitudes - dense_state).norm());
  o.at_most("Krylov vs dense exponential, dim <= 500", krylov, 1e-9);

  double lanczos = 0.0;
  for (Index n : {40, 300}) {
    const CMatrix h = random_hermitian(n, rng);
    EigenOptions eo;
    eo.nev = 2;
    const EigenResult got = lowest_eigenpairs(dense_matvec(h), random_vector(n, rng), eo);
    const EigenResult ref = dense_lowest_eigenpairs(h, 2);
    for (int k = 0; k < 2; ++k) {
      lanczos = std::max(lanczos, std::abs(got.values[k] - ref.values[k]) / (1.0 + std::abs(ref.values[k])));
    }
  }
  const HamiltonianSet gs = assemble(disc, sector_space(disc, 2, 6), 0.5);
  const LowestPair iterative = lowest_eigenpair(gs, {}, 0);
  const LowestPair dense = lowest_eigenpair(gs, {}, 100000);
  lanczos = std::max(lanczos, std::abs(iterative.e0 - dense.e0) / (1.0 + std::abs(dense.e0)));
  o.at_most("Lanczos vs dense eigensolver", lanczos, 1e-9);

  const Discretization flow_disc = production_model(0.5);
  const FieldState z = random_state(flow_disc, rng, 1.0, 0.5);
  FlowOptions ref, coarse, fine;
  ref.dt = 0.01 / 16.0;
  coarse.dt = 0.01;
  fine.dt = 0.005;
  const FieldState zr = flow_to(flow_disc, z, 0.0, 1.0, ref);
  const double ratio = norm(flow_disc, flow_to(flow_disc, z, 0.0, 1.0, coarse) - zr) /
                       norm(flow_disc, flow_to(flow_disc, z, 0.0, 1.0, fine) - zr);
  o.within("Richardson error ratio at dt 0.01 / 0.005", ratio, 3.5, 4.5);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"coherent-energy identity", coherent_energy_identity},
      {"conservation laws", conservation},
      {"Duhamel formula and eps expansion", duhamel},
      {"operator inequalities", inequalities},
      {"Weyl conjugation identities", weyl_identities},
      {"ground-state energy convergence", ground_state_convergence},
      {"characteristic-function limit", characteristic_limit},
      {"classical minimizer", minimizer},
      {"oracle equivalences", oracles_agree},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.lines.push_back({std::string("exception: ") + e.what(), 0.0, 0.0, false});
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const Line& l : out.lines) {
      std::printf("    [%s] %s: %.6g (limit %.12g)\n", l.pass ? "ok" : "no", l.label.c_str(), l.value, l.limit);
    }
    std::printf("%s criterion %zu: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
