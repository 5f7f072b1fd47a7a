#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "nelson/classical_dynamics.hpp"
#include "nelson/classical_energy.hpp"
#include "nelson/ground_state.hpp"
#include "nelson/limit_harness.hpp"
#include "nelson/operator_checks.hpp"
#include "nelson/quantum_dynamics.hpp"

namespace lab {

using nlohmann::json;
using namespace nelson;

bool ScenarioResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

Check at_most(std::string name, double value, double limit) { return {std::move(name), value, limit, value <= limit}; }

Check holds(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, ok}; }

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const Check& c : checks) {
    out.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
  }
  return out;
}

Table checks_table(const std::vector<Check>& checks) {
  Table t{"checks", {"name", "value", "limit", "pass"}, {}};
  for (const Check& c : checks) t.add({c.name, fmt(c.value), fmt(c.limit), fmt(c.pass)});
  return t;
}

FlowOptions flow_options(const Config& c) {
  FlowOptions f;
  f.dt = c.dynamics.dt;
  f.mode = c.dynamics.free_flow == "exact" ? FreeFlowMode::exact : FreeFlowMode::split_step;
  f.record_every = c.dynamics.record_every;
  return f;
}

PropagateOptions propagate_options(const Config& c) {
  PropagateOptions p;
  p.krylov.krylov_dim = c.dynamics.krylov_dim;
  p.krylov.tolerance = c.dynamics.krylov_tolerance;
  return p;
}

Discretization decoupled(const Config& c) {
  Config z = c;
  z.model.chi_preset = "zero";
  return build_discretization(z);
}

FieldState initial_center(const Discretization& disc, const Config& c, double nucleon_norm) {
  std::mt19937_64 rng(c.run.seed);
  return random_state(disc, rng, nucleon_norm, c.sweeps.initial_meson_norm);
}

json state_json(const FieldState& z) {
  json re1 = json::array(), im1 = json::array(), re2 = json::array(), im2 = json::array();
  for (Index j = 0; j < z.z1.size(); ++j) {
    re1.push_back(z.z1[j].real());
    im1.push_back(z.z1[j].imag());
  }
  for (Index m = 0; m < z.z2.size(); ++m) {
    re2.push_back(z.z2[m].real());
    im2.push_back(z.z2[m].imag());
  }
  return {{"z1_re", re1}, {"z1_im", im1}, {"z2_re", re2}, {"z2_im", im2}};
}

double relative_drift(double drift, double reference) {
  return std::abs(reference) > 1e-12 ? drift / std::abs(reference) : drift;
}

// Endpoint errors of the flow at dt and dt/2 against a dt/16 reference.
double richardson_ratio(const Discretization& disc, const FieldState& z, double t, double dt, const FlowOptions& base) {
  FlowOptions ref = base, coarse = base, fine = base;
  ref.dt = dt / 16.0;
  coarse.dt = dt;
  fine.dt = dt / 2.0;
  const FieldState zr = flow_to(disc, z, 0.0, t, ref);
  const double ec = norm(disc, flow_to(disc, z, 0.0, t, coarse) - zr);
  const double ef = norm(disc, flow_to(disc, z, 0.0, t, fine) - zr);
  return ec / ef;
}

ScenarioResult classical_flow_scenario(const Config& c) {
  const Discretization disc = build_discretization(c);
  const Thresholds& th = c.run.thresholds;
  const FieldState z0 = initial_center(disc, c, disc.charge());
  const Trajectory traj = flow(disc, z0, 0.0, c.dynamics.t_final, flow_options(c));

  double charge_drift = 0.0;
  for (double q : traj.charge_log) charge_drift = std::max(charge_drift, std::abs(q - traj.charge_log.front()));
  const double h0 = traj.energy_log.front();
  const double energy_drift = relative_drift(classical_energy_along(traj), h0);
  const double ratio = richardson_ratio(disc, z0, std::min(1.0, c.dynamics.t_final), 0.01, flow_options(c));

  ScenarioResult r;
  r.checks.push_back(at_most("charge_drift", charge_drift, th.charge_drift));
  r.checks.push_back(at_most("energy_drift_relative", energy_drift, th.energy_drift));
  r.checks.push_back({"richardson_ratio", ratio, 4.5, ratio >= 3.5 && ratio <= 4.5});

  Table t{"trajectory", {"t", "charge", "energy", "nucleon_norm2", "meson_norm2"}, {}};
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const FieldState& s = traj.states[i];
    t.add({fmt(traj.times[i]), fmt(traj.charge_log[i]), fmt(traj.energy_log[i]),
           fmt(std::pow(nucleon_norm(disc, s.z1), 2)), fmt(std::pow(meson_norm(disc, s.z2), 2))});
  }
  r.tables.push_back(std::move(t));
  r.summary = {{"initial_energy", h0},
               {"final_energy", traj.energy_log.back()},
               {"charge", traj.charge_log.front()},
               {"charge_drift", charge_drift},
               {"energy_drift_relative", energy_drift},
               {"richardson_ratio", ratio},
               {"records", traj.times.size()},
               {"initial_state", state_json(z0)},
               {"final_state", state_json(traj.states.back())}};
  return r;
}

ScenarioResult minimize_scenario(const Config& c) {
  const Discretization disc = build_discretization(c);
  const Thresholds& th = c.run.thresholds;
  MinimizationOptions mo;
  mo.seed = c.run.seed;
  const MinimizationResult m = minimize_constrained(disc, mo);

  // Central differences of the reduced functional along random directions.
  std::mt19937_64 rng(c.run.seed + 1);
  double worst_gradient = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CVector z1 = random_vector(disc.sites(), rng);
    const CVector v = random_vector(disc.sites(), rng);
    const double h = 1e-6;
    const double fd = (reduced_functional(disc, z1 + h * v) - reduced_functional(disc, z1 - h * v)) / (2.0 * h);
    const double an = disc.dx() * reduced_gradient(disc, z1).dot(v).real();
    worst_gradient = std::max(worst_gradient, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  }
  const double lowest = m.history.empty() ? m.value : *std::min_element(m.history.begin(), m.history.end());

  ScenarioResult r;
  r.checks.push_back(holds("converged", m.converged));
  r.checks.push_back(at_most("gradient_vs_finite_difference", worst_gradient, th.gradient));
  r.checks.push_back({"iterates_above_lower_bound", lowest, m.lower_bound, lowest >= m.lower_bound});

  Table hist{"history", {"iteration", "value"}, {}};
  for (std::size_t i = 0; i < m.history.size(); ++i) hist.add({fmt(static_cast<long long>(i)), fmt(m.history[i])});
  Table nuc{"minimizer_nucleon", {"site", "x", "re", "im", "density"}, {}};
  for (int j = 0; j < disc.sites(); ++j) {
    const Complex v = m.minimizer.z1[j];
    nuc.add({fmt(static_cast<long long>(j)), fmt(disc.x()[j]), fmt(v.real()), fmt(v.imag()), fmt(std::norm(v))});
  }
  Table mes{"minimizer_meson", {"mode", "k", "re", "im"}, {}};
  for (int k = 0; k < disc.modes(); ++k) {
    const Complex v = m.minimizer.z2[k];
    mes.add({fmt(static_cast<long long>(k)), fmt(disc.k()[k]), fmt(v.real()), fmt(v.imag())});
  }
  r.tables = {hist, nuc, mes};
  const EnergyBreakdown e = evaluate_h(disc, m.minimizer);
  r.summary = {{"value", m.value},
               {"lower_bound", m.lower_bound},
               {"grad_norm", m.grad_norm},
               {"iterations", m.iterations},
               {"converged", m.converged},
               {"start_index", m.start_index},
               {"h0_nucleon", e.h0_nucleon},
               {"h0_meson", e.h0_meson},
               {"h_interaction", e.h_interaction},
               {"gradient_check", worst_gradient},
               {"minimizer", state_json(m.minimizer)}};
  return r;
}

SpacePtr truncated_space(const Discretization& disc, int n_max, int m_max) {
  return make_space(FockBasis::truncated(BasisKind::nucleon_truncated, disc.sites(), n_max),
                    FockBasis::truncated(BasisKind::meson_truncated, disc.modes(), m_max));
}

SpacePtr sector_space(const Discretization& disc, int n, int m_max) {
  return make_space(FockBasis::sector(disc.sites(), n),
                    FockBasis::truncated(BasisKind::meson_truncated, disc.modes(), m_max));
}

ScenarioResult duhamel_scenario(const Config& c) {
  const Discretization disc = build_discretization(c);
  const double eps = c.truncation.eps;
  const SpacePtr space = truncated_space(disc, c.truncation.nucleon_cap, c.truncation.meson_cap);
  const HamiltonianSet hs = assemble(disc, space, eps);
  const FieldState z0 = initial_center(disc, c, c.sweeps.initial_nucleon_norm);
  const QuantumState initial = coherent_state(disc, space, z0, eps, 1.0);
  const std::vector<FieldState> panel = default_xi_panel(disc, c.sweeps.xi_count, c.sweeps.xi_size, c.run.seed + 1);

  ScenarioResult r;
  Table t{"duhamel", {"t", "xi_index", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual", "quadrature_error"}, {}};
  double worst = 0.0, worst_quadrature = 0.0;
  for (double time : c.dynamics.t_panel) {
    for (std::size_t x = 0; x < panel.size(); ++x) {
      const DuhamelReport d = duhamel_check(disc, hs, initial, panel[x], time, c.dynamics.duhamel_nodes);
      worst = std::max(worst, d.residual);
      worst_quadrature = std::max(worst_quadrature, d.quadrature_error);
      t.add({fmt(time), fmt(static_cast<long long>(x)), fmt(d.lhs.real()), fmt(d.lhs.imag()), fmt(d.rhs.real()),
             fmt(d.rhs.imag()), fmt(d.residual), fmt(d.quadrature_error)});
    }
  }
  r.tables.push_back(std::move(t));
  r.checks.push_back(at_most("duhamel_residual", worst, c.run.thresholds.duhamel_residual));
  r.summary = {{"dimension", space->dimension()},
               {"eps", eps},
               {"initial_deficit", initial.deficit},
               {"max_residual", worst},
               {"max_quadrature_error", worst_quadrature},
               {"nodes", c.dynamics.duhamel_nodes}};
  return r;
}

json limit_report_json(const LimitSweepReport& rep) {
  json runs = json::array();
  for (const LimitRun& run : rep.runs) {
    runs.push_back({{"eps", run.eps},
                    {"nucleon_cap", run.nucleon_cap},
                    {"meson_cap", run.meson_cap},
                    {"dimension", run.dimension},
                    {"deficit", run.deficit},
                    {"norm_drift", run.norm_drift}});
  }
  return {{"runs", runs},
          {"monotone", rep.monotone},
          {"terminal_error", rep.terminal_error},
          {"slopes", rep.slopes},
          {"t_spread", rep.t_spread}};
}

Table limit_samples_table(const std::string& name, const LimitSweepReport& rep) {
  Table t{name, {"eps", "t", "xi_index", "error", "quantum_re", "quantum_im", "classical_re", "classical_im"}, {}};
  for (const CharFnSample& s : rep.samples) {
    t.add({fmt(s.eps), fmt(s.t), fmt(static_cast<long long>(s.xi_index)), fmt(s.error), fmt(s.quantum_value.real()),
           fmt(s.quantum_value.imag()), fmt(s.classical_value.real()), fmt(s.classical_value.imag())});
  }
  return t;
}

ScenarioResult limit_scenario(const Config& c) {
  const Discretization disc = build_discretization(c);
  const Thresholds& th = c.run.thresholds;
  const FieldState z0 = initial_center(disc, c, c.sweeps.initial_nucleon_norm);
  const std::vector<FieldState> panel = default_xi_panel(disc, c.sweeps.xi_count, c.sweeps.xi_size, c.run.seed + 1);
  LimitSweepOptions o;
  o.eps_list = c.sweeps.eps_list;
  o.t_panel = c.dynamics.t_panel;
  o.tail = c.truncation.tail;
  o.cap_margin = c.truncation.cap_margin;
  o.flow = flow_options(c);
  o.flow.record_every = 1 << 30;
  o.propagation = propagate_options(c);
  o.parallel = c.run.parallel;
  const LimitSweepReport rep = limit_sweep(disc, z0, panel, o);

  ScenarioResult r;
  r.checks.push_back(holds("errors_strictly_decrease", rep.monotone));
  r.checks.push_back(at_most("terminal_error", rep.terminal_error, th.terminal_error));
  r.tables.push_back(limit_samples_table("samples", rep));
  Table runs{"runs", {"eps", "nucleon_cap", "meson_cap", "dimension", "deficit", "norm_drift"}, {}};
  for (const LimitRun& run : rep.runs) {
    runs.add({fmt(run.eps), fmt(static_cast<long long>(run.nucleon_cap)), fmt(static_cast<long long>(run.meson_cap)),
              fmt(static_cast<long long>(run.dimension)), fmt(run.deficit), fmt(run.norm_drift)});
  }
  r.tables.push_back(std::move(runs));
  Table eh{"ehrenfest", {"eps", "t", "meson_error", "density_error"}, {}};
  for (const EhrenfestSample& e : rep.ehrenfest) {
    eh.add({fmt(e.eps), fmt(e.t), fmt(e.meson_error), fmt(e.density_error)});
  }
  r.tables.push_back(std::move(eh));
  r.summary = {{"coupled", limit_report_json(rep)}, {"initial_state", state_json(z0)}};

  if (c.sweeps.control) {
    const Discretization free = decoupled(c);
    const LimitSweepReport ctl = limit_sweep(free, z0, panel, o);
    r.checks.push_back(at_most("control_t_spread", ctl.t_spread, th.control_spread));
    r.tables.push_back(limit_samples_table("control_samples", ctl));
    r.summary["control"] = limit_report_json(ctl);
  }
  return r;
}

json ground_records_json(const GroundSweepReport& rep) {
  json out = json::array();
  for (const GroundStateRecord& g : rep.records) {
    out.push_back({{"n", g.n},
                   {"eps", g.eps},
                   {"e_quantum", g.e_quantum},
                   {"e_coherent", g.e_coherent},
                   {"e_classical", g.e_classical},
                   {"abs_delta", std::abs(g.e_quantum - g.e_classical)},
                   {"m_max", g.m_max},
                   {"gap", g.gap},
                   {"m_check", g.m_check},
                   {"doubling_shift", g.doubling_shift},
                   {"coherent_deficit", g.coherent_deficit},
                   {"residual", g.residual},
                   {"dimension", g.dimension}});
  }
  return out;
}

Table ground_table(const std::string& name, const GroundSweepReport& rep) {
  Table t{name,
          {"n", "eps", "E_quantum", "E_coherent", "E_classical", "abs_delta", "m_max", "gap", "m_check",
           "doubling_shift", "dimension"},
          {}};
  for (const GroundStateRecord& g : rep.records) {
    t.add({fmt(static_cast<long long>(g.n)), fmt(g.eps), fmt(g.e_quantum), fmt(g.e_coherent), fmt(g.e_classical),
           fmt(std::abs(g.e_quantum - g.e_classical)), fmt(static_cast<long long>(g.m_max)), fmt(g.gap),
           fmt(static_cast<long long>(g.m_check)), fmt(g.doubling_shift), fmt(static_cast<long long>(g.dimension))});
  }
  return t;
}

ScenarioResult ground_energy_scenario(const Config& c) {
  const Discretization disc = build_discretization(c);
  const Thresholds& th = c.run.thresholds;
  GroundSweepOptions o;
  o.n_list = c.sweeps.n_list;
  o.m_max = c.truncation.m_floor;
  o.doubling_check = c.truncation.doubling_check;
  o.deficit_cap = c.truncation.deficit_cap;
  o.minimization.seed = c.run.seed;
  o.parallel = c.run.parallel;
  const GroundSweepReport rep = ground_energy_sweep(disc, o);

  double sandwich = -1e300;
  for (const GroundStateRecord& g : rep.records) sandwich = std::max(sandwich, g.e_quantum - g.e_coherent);
  ScenarioResult r;
  r.checks.push_back(holds("abs_delta_nonincreasing_from_n2", rep.gaps_nonincreasing));
  r.checks.push_back(at_most("quantum_minus_coherent", sandwich, th.sandwich));
  if (c.truncation.doubling_check) {
    r.checks.push_back(at_most("doubling_shift", rep.max_doubling_shift, th.doubling_shift));
  }
  r.tables.push_back(ground_table("sweep", rep));
  r.summary = {{"e_classical", rep.classical.value},
               {"lower_bound", rep.classical.lower_bound},
               {"records", ground_records_json(rep)},
               {"gaps_nonincreasing", rep.gaps_nonincreasing},
               {"max_doubling_shift", rep.max_doubling_shift}};

  if (c.sweeps.control) {
    GroundSweepOptions oc = o;
    oc.doubling_check = false;
    const GroundSweepReport ctl = ground_energy_sweep(decoupled(c), oc);
    double worst = 0.0;
    for (const GroundStateRecord& g : ctl.records) worst = std::max(worst, std::abs(g.e_quantum - g.e_classical));
    r.checks.push_back(at_most("control_exactness", worst, th.control_exact));
    r.tables.push_back(ground_table("control_sweep", ctl));
    r.summary["control"] = {{"e_classical", ctl.classical.value}, {"records", ground_records_json(ctl)}};
  }
  return r;
}

// Largest product dimension the Weyl-conjugation identities may build.
constexpr Index kIdentityLimit = 250000;

ScenarioResult property_suite_scenario(const Config& c) {
  const Discretization disc = build_discretization(c);
  const Thresholds& th = c.run.thresholds;
  const double eps = c.truncation.eps;
  const int margin = 10;
  const int n_core = std::min(c.truncation.nucleon_cap, 2);
  const int m_core = std::min(c.truncation.meson_cap, 3);
  const Index identity_dim = expected_dimension(BasisKind::nucleon_truncated, disc.sites(), n_core + margin) *
                             expected_dimension(BasisKind::meson_truncated, disc.modes(), m_core + margin);
  if (identity_dim > kIdentityLimit) {
    throw ConfigInvalid("grid.sites: Weyl identity checks need a widened basis of dimension " +
                        std::to_string(identity_dim) + " (limit " + std::to_string(kIdentityLimit) +
                        "); use a smaller grid for property-suite");
  }

  ScenarioResult r;
  std::mt19937_64 rng(c.run.seed);

  BoundOptions bo;
  bo.nucleons = c.truncation.sector_n;
  bo.meson_cap = c.truncation.meson_cap;
  bo.samples = c.sweeps.samples;
  bo.seed = c.run.seed;
  for (const BoundCheck& b : check_relative_bounds(disc, eps, bo)) {
    r.checks.push_back(at_most("bound_" + b.name, b.max_ratio, 1.0 + th.exact_bound));
  }

  const HamiltonianSet sector = assemble(disc, sector_space(disc, c.truncation.sector_n, c.truncation.meson_cap), eps);
  for (double delta : {0.5, 1.0}) {
    const GronwallReport g = gronwall_bound_check(disc, sector, delta, 1.0, c.sweeps.samples, c.run.seed);
    r.checks.push_back(at_most("gronwall_delta_" + fmt(delta), g.ratio, th.gronwall_ratio));
  }

  for (int k = 0; k < 5; ++k) {
    const bool meson = k % 2 == 0;
    const int modes = meson ? std::min(disc.modes(), 2) : 3;
    const CVector xi = 0.4 * random_vector(modes, rng);
    CMatrix b(modes, modes);
    for (int j = 0; j < modes; ++j) b.col(j) = random_vector(modes, rng);
    const CMatrix y = b.adjoint() * b;
    const double res = weyl_dgamma_residual(meson ? BasisKind::meson_truncated : BasisKind::nucleon_truncated, modes,
                                            meson ? 3 : 2, 12, xi, y, meson ? disc.dk() : disc.dx(), eps);
    r.checks.push_back(at_most("weyl_dgamma_" + std::to_string(k), res, th.identity_residual));
  }

  for (int k = 0; k < 5; ++k) {
    const FieldState xi = random_state(disc, rng, 0.4, 0.4);
    const InteractionConjugation ic = weyl_interaction_residuals(disc, n_core, m_core, margin, xi, eps);
    r.checks.push_back(at_most("weyl_interaction_shifted_" + std::to_string(k), ic.shifted_residual,
                               th.identity_residual));
    r.checks.push_back(at_most("weyl_interaction_expansion_" + std::to_string(k), ic.expansion_residual,
                               th.identity_residual));
  }

  {
    const int n = c.truncation.sector_n;
    const double eps_n = disc.charge() * disc.charge() / n;
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const FieldState z = random_state(disc, rng, disc.charge(), 0.3);
      const int cap = poisson_cap(std::pow(meson_norm(disc, z.z2), 2) / eps_n, 0.1 * c.truncation.deficit_cap);
      const HamiltonianSet hs = assemble(disc, sector_space(disc, n, cap), eps_n);
      const CoherentEnergy ce = coherent_upper_bound(disc, hs, z, c.truncation.deficit_cap);
      const double h = evaluate_h(disc, z).total;
      worst = std::max(worst, std::abs(ce.value - h) / (1.0 + std::abs(h)));
    }
    r.checks.push_back(at_most("coherent_energy_identity", worst, th.coherent_identity));
  }

  {
    const HamiltonianSet hs =
        assemble(disc, truncated_space(disc, c.truncation.nucleon_cap, c.truncation.meson_cap), eps);
    QuantumState s;
    s.space = hs.space;
    s.eps = eps;
    s.amplitudes = random_vector(hs.space->dimension(), rng);
    s.amplitudes /= s.amplitudes.norm();
    const QuantumState st = propagate(s, hs, 1.0, propagate_options(c));
    const double e0 = s.amplitudes.dot(hs.h.apply(s.amplitudes)).real();
    const double e1 = st.amplitudes.dot(hs.h.apply(st.amplitudes)).real();
    r.checks.push_back(at_most("quantum_norm_drift", std::abs(st.amplitudes.norm() - 1.0), th.quantum_norm));
    r.checks.push_back(at_most("quantum_energy_drift", relative_drift(std::abs(e1 - e0), e0), th.quantum_energy));
  }

  r.summary = {{"eps", eps}, {"identity_dimension", identity_dim}};
  return r;
}

const std::map<std::string, std::function<ScenarioResult(const Config&)>>& registry() {
  static const std::map<std::string, std::function<ScenarioResult(const Config&)>> r{
      {"classical-flow", classical_flow_scenario}, {"minimize", minimize_scenario},
      {"duhamel", duhamel_scenario},               {"theorem1", limit_scenario},
      {"theorem2", ground_energy_scenario},             {"property-suite", property_suite_scenario}};
  return r;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"classical-flow", "minimize", "duhamel",
                                              "theorem1",       "theorem2", "property-suite"};
  return names;
}

ScenarioResult run_scenario(const std::string& name, const Config& config) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ConfigInvalid("unknown scenario: " + name);
  ScenarioResult r = it->second(config);
  r.summary["checks"] = checks_json(r.checks);
  r.summary["passed"] = r.passed();
  r.tables.push_back(checks_table(r.checks));
  return r;
}

}  // namespace lab
