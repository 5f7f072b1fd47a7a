#pragma once

#include <cstdint>
#include <vector>

#include "nelson/classical_dynamics.hpp"
#include "nelson/quantum_dynamics.hpp"

namespace nelson {

/// <psi, W(xi) psi>.
Complex characteristic_function(const Discretization& disc, const QuantumState& state, const FieldState& xi);

/// exp(i sqrt2 Re<xi, z>), the characteristic function of the point mass at z.
Complex classical_characteristic(const Discretization& disc, const FieldState& xi, const FieldState& z);

/// Average of exp(i sqrt2 Re<xi, Phi(t,0)(e^{i theta} z1 + z2)>) over theta
/// on `nodes` equispaced phases. The flow commutes with the nucleon phase,
/// so one trajectory serves every theta.
Complex phase_averaged_characteristic(const Discretization& disc, const FieldState& xi, const FieldState& z0,
                                      double t, int nodes = 256, const FlowOptions& flow_options = {});

/// Deterministic panel of test vectors: nucleon-only, meson-only and mixed
/// directions, each of norm `size`.
std::vector<FieldState> default_xi_panel(const Discretization& disc, int count, double size, std::uint64_t seed);

struct CharFnSample {
  double t = 0.0;
  int xi_index = 0;
  double eps = 0.0;
  Complex quantum_value = 0.0;
  Complex classical_value = 0.0;
  double error = 0.0;
};

struct EhrenfestSample {
  double t = 0.0;
  double eps = 0.0;
  double meson_error = 0.0;    // max_m |<a_m>/sqrt(dk) - z2_m(t)|
  double density_error = 0.0;  // max_j |<psi_j^+ psi_j>/dx - |z1_j(t)|^2|
};

struct LimitRun {
  double eps = 0.0;
  int nucleon_cap = 0;
  int meson_cap = 0;
  Index dimension = 0;
  double deficit = 0.0;
  double norm_drift = 0.0;
};

struct LimitSweepOptions {
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  std::vector<double> t_panel{0.25, 0.5};
  double tail = 1e-4;   // Poisson tail allowed beyond each cap
  int cap_margin = 2;   // added to each Poisson cap
  FlowOptions flow;
  PropagateOptions propagation;
  bool parallel = true;
};

struct LimitSweepReport {
  std::vector<LimitRun> runs;
  std::vector<CharFnSample> samples;
  std::vector<EhrenfestSample> ehrenfest;
  bool monotone = false;          // error strictly decreasing along eps_list for every (t, xi)
  double terminal_error = 0.0;    // max error at the last eps
  std::vector<double> slopes;     // log-log slope per (t, xi), t-major
  double t_spread = 0.0;          // max over (eps, xi) of the error spread across t
};

/// Coherent data C(z0) on truncated nucleon and meson spaces, propagated
/// with e^{-i(t/eps)H} and compared against the classical flow of z0.
LimitSweepReport limit_sweep(const Discretization& disc, const FieldState& z0, const std::vector<FieldState>& xi_panel,
                              const LimitSweepOptions& options = {});

/// Field expectations against the classical trajectory for one state
/// prepared as C(z0) and propagated along t_panel.
std::vector<EhrenfestSample> ehrenfest_track(const Discretization& disc, const HamiltonianSet& hs,
                                             const QuantumState& initial, const FieldState& z0,
                                             const std::vector<double>& t_panel, const FlowOptions& flow_options = {});

}  // namespace nelson
