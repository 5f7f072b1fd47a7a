#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nelson/field_state.hpp"

namespace nelson {

struct EnergyBreakdown {
  double h0_nucleon = 0.0;
  double h0_meson = 0.0;
  double h_interaction = 0.0;
  double total = 0.0;
};

/// rho_hat_m = sum_j dx exp(-i k_m x_j) |z1_j|^2 on the selected modes.
CVector density_transform(const Discretization& disc, const CVector& z1);

/// Real site potential generated by a meson amplitude w:
/// U(w)_j = 2 Re sum_m sqrt(dk) conj(g_mj) w_m.
RVector meson_potential(const Discretization& disc, const CVector& w);

EnergyBreakdown evaluate_h(const Discretization& disc, const FieldState& z);

/// dh/d(conj z2) divided by the quadrature weight: omega z2 + (chi/sqrt(omega)) rho_hat.
CVector meson_gradient(const Discretization& disc, const FieldState& z);

/// Minimizer of h over z2 at fixed z1: -chi rho_hat / omega^{3/2}.
CVector eliminate_meson(const Discretization& disc, const CVector& z1);

/// <z1, A z1> - sum_m dk (chi/omega)^2 |rho_hat_m|^2.
double reduced_functional(const Discretization& disc, const CVector& z1);

/// Gradient of the reduced functional for the real inner product
/// Re sum_j dx conj(u_j) v_j. Equals 2 (A + U(z2*)) z1.
CVector reduced_gradient(const Discretization& disc, const CVector& z1);

/// -lambda^4 ||chi/omega||^2.
double energy_lower_bound(const Discretization& disc);

struct MinimizationOptions {
  double tolerance = 1e-8;
  int max_iterations = 20000;
  std::uint64_t seed = 7;
};

struct MinimizationResult {
  FieldState minimizer;
  double value = 0.0;
  double grad_norm = 0.0;
  double lower_bound = 0.0;
  int iterations = 0;
  bool converged = false;
  int start_index = 0;          // which multistart seed won
  std::vector<double> history;  // reduced functional at accepted iterates
};

/// Projected gradient descent with Armijo backtracking on the sphere
/// ||z1|| = lambda, started from one seed.
MinimizationResult descend(const Discretization& disc, const CVector& seed,
                           const MinimizationOptions& options);

/// Best of three concurrent descents (one-body ground state, Gaussian bump,
/// random), or of a single descent when a seed is supplied. The phase is
/// fixed so that sum_j z1_j is real and positive.
MinimizationResult minimize_constrained(const Discretization& disc,
                                        const MinimizationOptions& options,
                                        const std::optional<CVector>& seed = std::nullopt);

/// Multiplies z1 by the phase that makes sum_j z1_j real and nonnegative.
CVector fix_phase(const CVector& z1);

}  // namespace nelson
