#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nelson/field_state.hpp"
#include "nelson/fock_space.hpp"

namespace nelson {

/// Largest observed lhs/rhs over random vectors for one inequality.
struct BoundCheck {
  std::string name;
  double max_ratio = 0.0;
  int samples = 0;
};

struct BoundOptions {
  int nucleons = 2;   // sector n for the fixed-n inequalities
  int meson_cap = 4;  // m_max
  int samples = 500;
  std::uint64_t seed = 17;
};

/// Field-operator bounds (annihilation/creation against H02 and N2, for
/// configuration-dependent kernels), the H_I bound against N1^2 + N2 + eps,
/// the dGamma relative bound with constant 1 + sqrt2, and the classical
/// interaction-field bound. Ratios at most 1 mean the bound holds.
std::vector<BoundCheck> check_relative_bounds(const Discretization& disc, double eps, const BoundOptions& options = {});

/// The kernel f_c(k) = (1/n) sum_j n_j h(k) e^{-i k x_j} for every sector
/// configuration c (rows) and selected mode (columns).
CMatrix configuration_kernel(const Discretization& disc, const FockBasis& sector, const CVector& h);

/// Operator norm by singular values. For small dense matrices.
double spectral_norm(const CMatrix& m);

/// Compression of W^* X W onto `core` positions of a larger basis, given the
/// core columns of W.
CMatrix conjugate_core(const CMatrix& w_core_columns, const SparseMatrix& x);

/// ||W^* dGamma(y) W - dGamma(y) - (i eps/sqrt2)(a^*(y xi) - a(y xi)) - (eps^2/2)<xi, y xi>||
/// on a single-species truncated basis with `core_cap`, evaluated through
/// a basis with `core_cap + margin` so that W does not leak unnoticed.
double weyl_dgamma_residual(BasisKind kind, int modes, int core_cap, int margin, const CVector& xi,
                            const CMatrix& y, double weight, double eps);

struct InteractionConjugation {
  double shifted_residual = 0.0;    // ||W^* HI W - B_eps||
  double expansion_residual = 0.0;  // ||(i/eps)(W^* HI W - HI) - (B0 + eps B1 + eps^2 B2)||
  double scale = 0.0;               // ||B0|| for reference
};

/// Both forms of the conjugated interaction on the core product space
/// (truncated nucleons with cap n_core, mesons with cap m_core).
InteractionConjugation weyl_interaction_residuals(const Discretization& disc, int n_core, int m_core, int margin,
                                                  const FieldState& xi, double eps);

}  // namespace nelson
