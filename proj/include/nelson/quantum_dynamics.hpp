#pragma once

#include <cstdint>

#include "nelson/field_state.hpp"
#include "nelson/fock_space.hpp"
#include "nelson/linalg.hpp"
#include "nelson/weyl.hpp"

namespace nelson {

/// H0 = eps (dGamma(A) (x) 1 + 1 (x) dGamma(omega)),
/// HI = eps^{3/2} sum_m (C_m (x) b_m^+ + C_m^* (x) b_m) with
/// C_m = sum_j n_j g_mj diagonal in the nucleon occupations, H = H0 + HI.
/// The generators are the same operators divided by eps, assembled
/// directly so that no 1/eps cancellation occurs.
struct HamiltonianSet {
  SpacePtr space;
  double eps = 1.0;
  TensorOperator h0;
  TensorOperator hi;
  TensorOperator h;
  TensorOperator generator;     // H / eps
  TensorOperator h0_generator;  // H0 / eps
};

HamiltonianSet assemble(const Discretization& disc, const SpacePtr& space, double eps);

/// Per nucleon basis state: sum_j n_j g_mj for one meson mode.
CVector coupling_diagonal(const Discretization& disc, const FockBasis& nucleon, int mode);

/// Diagonal of N1^2 + N2 + eps on the product space.
RVector number_weight(const ProductSpace& space, double eps);

MatVec as_matvec(const TensorOperator& op);

struct PropagateOptions {
  ExpvOptions krylov;
  Index dense_limit = 2000;
  bool force_dense = false;
};

/// e^{-i(t/eps)H} psi via Lanczos on H/eps. Falls back to the dense
/// exponential after a Krylov breakdown when the dimension allows it.
QuantumState propagate(const QuantumState& state, const HamiltonianSet& hs, double t,
                       const PropagateOptions& options = {});

/// e^{+i(t/eps)H0} applied to a state already evolved to time t.
QuantumState interaction_picture(const QuantumState& state_t, const HamiltonianSet& hs, double t,
                                 const PropagateOptions& options = {});

/// Expansion (i/eps)(W^* HI W - HI) = B0 + eps B1 + eps^2 B2. B2 is a scalar.
struct BOperators {
  TensorOperator b0;
  TensorOperator b1;
  Complex b2 = 0.0;
};

BOperators b_operators(const Discretization& disc, const SpacePtr& space, const FieldState& xi, double eps);

/// W^*(xi) HI W(xi) assembled from the shifted fields
/// psi_j + i (eps/sqrt2) sqrt(dx) xi1_j and a_m + i (eps/sqrt2) sqrt(dk) xi2_m.
TensorOperator shifted_interaction(const Discretization& disc, const SpacePtr& space, const FieldState& xi,
                                   double eps);

struct DuhamelReport {
  double t = 0.0;
  FieldState xi;
  Complex lhs = 0.0;
  Complex rhs = 0.0;
  double residual = 0.0;
  double quadrature_error = 0.0;
  int quadrature_nodes = 0;
  Complex start = 0.0;       // Tr[rho W(xi)]
  Complex leading = 0.0;     // integral of the B0 term
  Complex correction = 0.0;  // integral of the eps B1 + eps^2 B2 terms
};

/// Both sides of Tr[rho~(t) W(xi)] = Tr[rho W(xi)] + sum_j eps^j int_0^t Tr[rho(s) W(xi~(s)) B_j(xi~(s))] ds,
/// with Simpson quadrature over 4k+1 nodes. The quadrature error is
/// estimated against the rule on every other node. The right side is
/// evaluated on bases widened by `margin` quanta, so that W and B_j act
/// on the truncated state without clipping.
DuhamelReport duhamel_check(const Discretization& disc, const HamiltonianSet& hs, const QuantumState& initial,
                            const FieldState& xi, double t, int nodes = 65, int margin = 4);

struct GronwallReport {
  double delta = 0.0;
  double t = 0.0;
  double lhs_norm = 0.0;       // power-iteration estimate of the operator norm
  double bound = 0.0;          // exp(m_delta sqrt(eps) |delta| |t| ||omega^{-1/2} chi||)
  double ratio = 0.0;          // lhs_norm / bound
  double sampled_ratio = 0.0;  // max over random vectors
};

double gronwall_constant(double delta, double eps);

/// ||T^delta e^{-i(t/eps)H} T^{-delta}|| against its Gronwall bound, T = N1^2 + N2 + eps.
GronwallReport gronwall_bound_check(const Discretization& disc, const HamiltonianSet& hs, double delta, double t,
                                    int samples = 500, std::uint64_t seed = 5);

}  // namespace nelson
