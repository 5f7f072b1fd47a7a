#pragma once

#include <vector>

#include "nelson/classical_energy.hpp"
#include "nelson/quantum_dynamics.hpp"

namespace nelson {

struct LowestPair {
  double e0 = 0.0;
  double e1 = 0.0;
  QuantumState psi0;
  double residual = 0.0;  // ||H psi0 - e0 psi0||
  long matvecs = 0;
  bool dense = false;
  std::vector<double> ritz_history;
};

/// Two lowest eigenvalues of H and the ground vector. Dense below
/// `dense_limit`, thick-restart Lanczos above it, started from `start`
/// when given. Throws ConvergenceFailure if Lanczos stalls.
LowestPair lowest_eigenpair(const HamiltonianSet& hs, const CVector& start = {}, Index dense_limit = 400,
                            const EigenOptions& options = {});

struct CoherentEnergy {
  double value = 0.0;    // <C, H C>
  double deficit = 0.0;  // truncation loss of C before renormalizing
};

/// <C(z), H C(z)> on the space of `hs` (nucleon sector n with n eps = ||z1||^2).
CoherentEnergy coherent_upper_bound(const Discretization& disc, const HamiltonianSet& hs, const FieldState& z,
                                    double deficit_cap = 1e-6);

struct GroundStateRecord {
  int n = 0;
  double eps = 0.0;
  double e_quantum = 0.0;
  double e_coherent = 0.0;
  double e_classical = 0.0;
  double gap = 0.0;  // E1 - E0
  int m_max = 0;
  double coherent_deficit = 0.0;
  double residual = 0.0;
  double doubling_shift = 0.0;  // |E0(m_check) - E0(m_max)|, 0 when not checked
  int m_check = 0;
  Index dimension = 0;
};

struct GroundSweepOptions {
  std::vector<int> n_list{1, 2, 3, 4, 5};
  int m_max = 4;               // floor for the meson cap
  bool doubling_check = true;  // recompute E_quantum with the cap doubled
  double deficit_cap = 1e-6;
  MinimizationOptions minimization;
  bool parallel = true;
};

struct GroundSweepReport {
  MinimizationResult classical;
  std::vector<GroundStateRecord> records;
  bool gaps_nonincreasing = false;  // |E_quantum - E_classical| for n >= 2
  bool sandwich = false;            // E_quantum <= E_coherent + 1e-6 for every n
  double max_doubling_shift = 0.0;
};

/// For each n: eps = lambda^2/n, lowest eigenvalue of H on the sector, and
/// the coherent energy at the classical minimizer. The meson cap is raised
/// above m_max when the coherent state needs it. Each n runs as its own job.
GroundSweepReport ground_energy_sweep(const Discretization& disc, const GroundSweepOptions& options = {});

}  // namespace nelson
