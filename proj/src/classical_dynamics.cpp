#include "nelson/classical_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nelson/classical_energy.hpp"

namespace nelson {

namespace {

CVector meson_phase(const Discretization& disc, double t) {
  CVector p(disc.modes());
  for (int m = 0; m < disc.modes(); ++m) p[m] = std::exp(-kI * (t * disc.omega()[m]));
  return p;
}

CVector split_step_nucleon(const Discretization& disc, const CVector& z1, double t) {
  const auto& v = disc.params().potential;
  CVector half(disc.sites());
  for (int j = 0; j < disc.sites(); ++j) half[j] = std::exp(-kI * (0.5 * t * v[j]));
  CVector u = half.cwiseProduct(z1);
  CVector modes = disc.transform().forward(u);
  const double mass = disc.params().nucleon_mass;
  for (int m = 0; m < disc.sites(); ++m) {
    const double k = disc.grid().mode(m);
    modes[m] *= std::exp(-kI * (t * k * k / (2.0 * mass)));
  }
  return half.cwiseProduct(disc.transform().inverse(modes));
}

// Precomputed half-step free propagator for the integrator loop.
struct HalfStep {
  CMatrix nucleon;
  CVector meson;
  FreeFlowMode mode;
  double tau;

  FieldState apply(const Discretization& disc, const FieldState& z) const {
    FieldState out;
    out.z1 = mode == FreeFlowMode::exact ? CVector(nucleon * z.z1) : split_step_nucleon(disc, z.z1, tau);
    out.z2 = meson.cwiseProduct(z.z2);
    return out;
  }
};

}  // namespace

FieldState free_flow(const Discretization& disc, const FieldState& z, double t, FreeFlowMode mode) {
  FieldState out;
  out.z1 = mode == FreeFlowMode::exact ? CVector(disc.one_body_propagator(t) * z.z1)
                                       : split_step_nucleon(disc, z.z1, t);
  out.z2 = meson_phase(disc, t).cwiseProduct(z.z2);
  return out;
}

FieldState interaction_field(const Discretization& disc, const FieldState& z) {
  const RVector u = meson_potential(disc, z.z2);
  const CVector rho = density_transform(disc, z.z1);
  FieldState out;
  out.z1 = -kI * (u.cast<Complex>().array() * z.z1.array()).matrix();
  out.z2 = -kI * (disc.coupling().cast<Complex>().array() * rho.array()).matrix();
  return out;
}

FieldState interaction_subflow(const Discretization& disc, const FieldState& z, double tau) {
  const CVector rho = density_transform(disc, z.z1);
  const CVector source = (disc.coupling().cast<Complex>().array() * rho.array()).matrix();
  const RVector theta = tau * meson_potential(disc, z.z2) + 0.5 * tau * tau * meson_potential(disc, -kI * source);
  FieldState out;
  out.z1.resize(disc.sites());
  for (int j = 0; j < disc.sites(); ++j) out.z1[j] = std::exp(-kI * theta[j]) * z.z1[j];
  out.z2 = z.z2 - kI * tau * source;
  return out;
}

Trajectory flow(const Discretization& disc, const FieldState& initial, double t0, double t1,
                const FlowOptions& options) {
  if (!(options.dt > 0.0)) throw ConfigInvalid("dt must be positive");
  if (options.record_every < 1) throw ConfigInvalid("record_every must be >= 1");
  const double span = t1 - t0;
  const long steps = std::max(1L, std::lround(std::abs(span) / options.dt));
  const double h = span / static_cast<double>(steps);

  HalfStep half{disc.one_body_propagator(0.5 * h), meson_phase(disc, 0.5 * h), options.mode, 0.5 * h};

  Trajectory traj;
  auto record = [&](double t, const FieldState& z) {
    traj.times.push_back(t);
    traj.states.push_back(z);
    traj.energy_log.push_back(evaluate_h(disc, z).total);
    traj.charge_log.push_back(nucleon_norm(disc, z.z1));
  };

  FieldState z = initial;
  record(t0, z);
  if (span == 0.0) return traj;
  double charge = nucleon_norm(disc, z.z1);
  for (long s = 1; s <= steps; ++s) {
    z = half.apply(disc, z);
    z = interaction_subflow(disc, z, h);
    z = half.apply(disc, z);
    const double c = nucleon_norm(disc, z.z1);
    if (std::abs(c - charge) > options.charge_guard) {
      throw StepSizeRejected("charge drift " + std::to_string(std::abs(c - charge)) + " in one step of size " +
                             std::to_string(h));
    }
    charge = c;
    if (s % options.record_every == 0 || s == steps) record(t0 + s * h, z);
  }
  return traj;
}

FieldState flow_to(const Discretization& disc, const FieldState& initial, double t0, double t1,
                   const FlowOptions& options) {
  FlowOptions opts = options;
  opts.record_every = std::numeric_limits<int>::max();
  return flow(disc, initial, t0, t1, opts).states.back();
}

double classical_energy_along(const Trajectory& traj) {
  double drift = 0.0;
  for (double e : traj.energy_log) drift = std::max(drift, std::abs(e - traj.energy_log.front()));
  return drift;
}

}  // namespace nelson
