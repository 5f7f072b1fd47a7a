#pragma once

#include "nelson/field_state.hpp"
#include "nelson/fock_space.hpp"

namespace nelson {

/// <m|D(beta)|n> for m, n <= cap, with D(beta) = exp(beta b^+ - conj(beta) b).
/// Computed by exponentiating the generator on a padded single-mode space.
CMatrix displacement_elements(Complex beta, int cap);

/// Compression onto `basis` of the exact Weyl operator exp(i(psi^*(xi) + psi(xi))/sqrt2),
/// where the smeared field uses quadrature weight `weight`. It factorizes
/// into single-mode displacements with beta_m = i sqrt(eps weight / 2) xi_m.
CMatrix weyl_factor(const FockBasis& basis, const CVector& xi, double weight, double eps);

/// W(xi) = W(xi1) (x) W(xi2) with dense factors. A factor whose argument
/// vanishes is stored as the identity.
class WeylOperator {
 public:
  WeylOperator(SpacePtr space, CMatrix nucleon, CMatrix meson, bool nucleon_identity, bool meson_identity);

  const SpacePtr& space() const { return space_; }
  const CMatrix& nucleon() const { return nucleon_; }
  const CMatrix& meson() const { return meson_; }
  bool nucleon_identity() const { return nucleon_identity_; }
  bool meson_identity() const { return meson_identity_; }

  CVector apply(const CVector& x) const;
  CVector apply_adjoint(const CVector& x) const;
  Complex expectation(const CVector& psi) const;

 private:
  SpacePtr space_;
  CMatrix nucleon_;
  CMatrix meson_;
  bool nucleon_identity_;
  bool meson_identity_;
};

/// Throws SectorBasisUnsupported when xi1 != 0 on a nucleon sector basis.
WeylOperator weyl(const Discretization& disc, const SpacePtr& space, const FieldState& xi, double eps);

/// Unnormalized product coherent amplitudes prod_m e^{-|a_m|^2/2} a_m^{n_m} / sqrt(n_m!).
CVector coherent_factor(const FockBasis& basis, const CVector& alpha);

/// sqrt(n! / prod n_j!) prod u_j^{n_j} on a sector basis: the symmetrized
/// n-fold product of the unit vector u.
CVector sector_product_factor(const FockBasis& basis, const CVector& u);

/// Coherent vector C(z). Meson amplitudes alpha_m = z2_m sqrt(dk/eps).
/// On a sector basis the nucleon factor is (z1/|z1|)^{(x) n}, which needs
/// n eps = ||z1||^2; on a truncated nucleon basis it is the full coherent
/// state with alpha_j = z1_j sqrt(dx/eps). Throws TruncationInsufficient
/// when the norm lost to truncation exceeds deficit_cap.
QuantumState coherent_state(const Discretization& disc, const SpacePtr& space, const FieldState& z, double eps,
                            double deficit_cap = 1e-6);

/// Probability mass outside {0..cap} of a Poisson law with the given mean.
double poisson_tail(double mean, int cap);

/// Smallest cap whose Poisson tail is at most `tail`.
int poisson_cap(double mean, double tail);

}  // namespace nelson
