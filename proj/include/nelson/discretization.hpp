#pragma once

#include <vector>

#include "nelson/types.hpp"

namespace nelson {

/// Periodic 1-D grid on [-L, L) with G sites and its dual momentum grid.
///
/// Sites are x_j = -L + j dx, j = 0..G-1, dx = 2L/G. Modes are
/// k_m = (m - G/2) dk with dk = pi/L, so index 0 is the most negative
/// wavenumber -pi G/(2L) and index G/2 is k = 0.
class Grid {
 public:
  Grid(double half_length, int sites);

  double half_length() const { return half_length_; }
  int sites() const { return sites_; }
  double dx() const { return 2.0 * half_length_ / sites_; }
  double dk() const;

  double site(int j) const { return -half_length_ + j * dx(); }
  double mode(int m) const { return (m - sites_ / 2) * dk(); }

  /// Index of the mode with the negated wavenumber. The extreme mode
  /// m = 0 has no partner on the grid and maps to itself.
  int mirror_mode(int m) const;

  RVector sites_vector() const;
  RVector modes_vector() const;

 private:
  double half_length_;
  int sites_;
};

/// Physical parameters. Cutoff samples live on all G grid modes; potential
/// samples on all G sites.
struct ModelParams {
  double nucleon_mass = 1.0;
  double meson_mass = 1.0;
  double charge = 1.0;  // lambda, the constraint ||z1|| = lambda
  RVector cutoff;       // chi(k_m), m = 0..G-1
  RVector potential;    // V(x_j), j = 0..G-1
};

double dispersion(double k, double meson_mass);

/// Cutoff presets. Both zero the unpaired extreme mode m = 0.
RVector gaussian_cutoff(const Grid& grid, double width, double scale);
RVector sharp_cutoff(const Grid& grid, double kappa, double scale);

RVector harmonic_potential(const Grid& grid, double strength);

/// Centered block of M grid modes: wavenumber offsets -floor(M/2) .. M-1-floor(M/2).
/// M = G returns the whole grid.
std::vector<int> centered_modes(const Grid& grid, int count);

/// g[m][j] = sqrt(dk) chi(k_m) / sqrt(omega(k_m)) exp(-i k_m x_j), all G modes.
CMatrix coupling_form_factor(const Grid& grid, const ModelParams& params);

/// Matrix of -Laplacian/(2M) + V on site vectors, Laplacian taken spectrally.
CMatrix one_body_hamiltonian(const Grid& grid, const ModelParams& params);

/// Unitary DFT between site vectors and grid-mode vectors:
/// (forward u)_m = G^{-1/2} sum_j exp(-i k_m x_j) u_j.
class SpectralTransform {
 public:
  explicit SpectralTransform(const Grid& grid);

  CVector forward(const CVector& sites) const;
  CVector inverse(const CVector& modes) const;

  /// Continuum-normalized transform dx/sqrt(2 pi) sum_j exp(-i k x_j) u_j,
  /// which satisfies sum_m dk |u_m|^2 = sum_j dx |u_j|^2.
  CVector to_momentum(const CVector& sites) const;
  CVector from_momentum(const CVector& momentum) const;

 private:
  Grid grid_;
  RVector sign_;  // (-1)^{m - G/2}
};

/// The shared geometry of the classical and quantum models: the grid,
/// the selected meson modes, and every derived one-body quantity.
/// Immutable after construction.
class Discretization {
 public:
  Discretization(Grid grid, ModelParams params, std::vector<int> meson_modes);

  const Grid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  const std::vector<int>& meson_modes() const { return meson_modes_; }

  int sites() const { return grid_.sites(); }
  int modes() const { return static_cast<int>(meson_modes_.size()); }
  double dx() const { return grid_.dx(); }
  double dk() const { return grid_.dk(); }
  double charge() const { return params_.charge; }

  const RVector& x() const { return x_; }
  const RVector& k() const { return k_; }          // selected modes
  const RVector& omega() const { return omega_; }  // selected modes
  const RVector& chi() const { return chi_; }      // selected modes
  /// chi/sqrt(omega) on selected modes (zero where chi vanishes).
  const RVector& coupling() const { return coupling_; }
  /// Selected rows of the coupling form factor (modes x sites).
  const CMatrix& form_factor() const { return form_factor_; }

  const CMatrix& one_body() const { return one_body_; }
  const RVector& one_body_eigenvalues() const { return one_body_values_; }
  const CMatrix& one_body_eigenvectors() const { return one_body_vectors_; }
  /// e^{-i t A} as a dense matrix.
  CMatrix one_body_propagator(double t) const;

  /// ||omega^{-1/2} chi||_2 over the selected modes.
  double chi_over_sqrt_omega_norm() const;
  /// ||chi/omega||_2 over the selected modes.
  double chi_over_omega_norm() const;

  const SpectralTransform& transform() const { return transform_; }

 private:
  Grid grid_;
  ModelParams params_;
  std::vector<int> meson_modes_;
  RVector x_, k_, omega_, chi_, coupling_;
  CMatrix form_factor_;
  CMatrix one_body_;
  RVector one_body_values_;
  CMatrix one_body_vectors_;
  SpectralTransform transform_;
};

}  // namespace nelson
