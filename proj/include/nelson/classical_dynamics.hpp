#pragma once

#include <vector>

#include "nelson/field_state.hpp"

namespace nelson {

enum class FreeFlowMode { exact, split_step };

/// Linear flow e^{-itA} z1 + e^{-it omega} z2. Exact mode uses the
/// eigendecomposition of the one-body matrix; split_step does one Strang
/// step of potential and Fourier-diagonal kinetic factors.
FieldState free_flow(const Discretization& disc, const FieldState& z, double t,
                     FreeFlowMode mode = FreeFlowMode::exact);

/// (-i Phi1(z), -i Phi2(z)) with Phi1 = U(z2) z1 and Phi2 = (chi/sqrt(omega)) rho_hat.
FieldState interaction_field(const Discretization& disc, const FieldState& z);

/// Exact solution of i dz/dt = (Phi1, Phi2) over time tau. |z1| is
/// invariant along it, so rho_hat is frozen and z2 moves linearly.
FieldState interaction_subflow(const Discretization& disc, const FieldState& z, double tau);

struct FlowOptions {
  double dt = 1e-3;
  FreeFlowMode mode = FreeFlowMode::exact;
  int record_every = 1;
  double charge_guard = 1e-6;  // max |Delta ||z1||| per step
};

struct Trajectory {
  std::vector<double> times;
  std::vector<FieldState> states;
  std::vector<double> energy_log;
  std::vector<double> charge_log;
};

/// Strang splitting: half free step, interaction subflow, half free step.
/// Second order in dt. Throws StepSizeRejected when the charge drifts by
/// more than options.charge_guard within one step.
Trajectory flow(const Discretization& disc, const FieldState& initial, double t0, double t1,
                const FlowOptions& options = {});

/// Endpoint of flow() without logging.
FieldState flow_to(const Discretization& disc, const FieldState& initial, double t0, double t1,
                   const FlowOptions& options = {});

/// max_t |h(z(t)) - h(z(t0))| along a trajectory.
double classical_energy_along(const Trajectory& traj);

}  // namespace nelson
