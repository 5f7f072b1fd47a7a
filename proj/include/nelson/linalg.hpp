#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nelson/types.hpp"

namespace nelson {

/// y = H x for a Hermitian operator given only through its action.
using MatVec = std::function<void(const CVector& x, CVector& y)>;

/// Dense exp(-i t H) by scaling and squaring.
CMatrix dense_propagator(const CMatrix& h, double t);

/// Builds the dense matrix of a MatVec column by column.
CMatrix materialize(const MatVec& h, Index dim);

struct ExpvOptions {
  int krylov_dim = 30;
  double tolerance = 1e-12;  // local error per unit time, relative to ||v||
  int max_substeps = 1000000;
};

struct ExpvStats {
  int substeps = 0;
  long matvecs = 0;
  double error_estimate = 0.0;
};

/// exp(-i t H) v by Lanczos with full reorthogonalization. The substep
/// is chosen from the a-posteriori estimate beta_m |e_m^T exp(-i tau T_m) e_1|.
/// Throws KrylovBreakdown on loss of orthogonality or non-finite data.
CVector expv(const MatVec& h, const CVector& v, double t, const ExpvOptions& options = {},
             ExpvStats* stats = nullptr);

struct EigenOptions {
  int nev = 1;
  int max_basis = 30;
  double tolerance = 1e-9;  // residual norm for each requested pair
  int max_matvecs = 20000;
  std::uint64_t seed = 23;  // for callers that randomize the start vector
};

struct EigenResult {
  RVector values;
  CMatrix vectors;
  RVector residuals;
  long matvecs = 0;
  bool converged = false;
  std::vector<double> ritz_history;  // lowest Ritz value after each expansion
};

/// Lowest eigenpairs of a Hermitian operator by thick-restart Lanczos:
/// Rayleigh-Ritz on a basis grown by residual vectors, restarted onto the
/// nev + 2 lowest Ritz vectors when it reaches max_basis.
EigenResult lowest_eigenpairs(const MatVec& h, const CVector& start, const EigenOptions& options = {});

/// Dense reference for lowest_eigenpairs.
EigenResult dense_lowest_eigenpairs(const CMatrix& h, int nev);

struct NormOptions {
  int max_iterations = 500;
  double tolerance = 1e-10;
  std::uint64_t seed = 11;
};

/// ||A|| by power iteration on A^* A.
double operator_norm(const MatVec& a, const MatVec& a_adjoint, Index dim, const NormOptions& options = {});

}  // namespace nelson
