#include "nelson/discretization.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace nelson {

Grid::Grid(double half_length, int sites) : half_length_(half_length), sites_(sites) {
  if (!(half_length > 0.0)) throw ConfigInvalid("grid half_length must be positive");
  if (sites < 4 || sites % 2 != 0) {
    throw ConfigInvalid("grid sites must be even and >= 4, got " + std::to_string(sites));
  }
}

double Grid::dk() const { return std::numbers::pi / half_length_; }

int Grid::mirror_mode(int m) const {
  if (m == 0) return 0;
  return sites_ - m;
}

RVector Grid::sites_vector() const {
  RVector out(sites_);
  for (int j = 0; j < sites_; ++j) out[j] = site(j);
  return out;
}

RVector Grid::modes_vector() const {
  RVector out(sites_);
  for (int m = 0; m < sites_; ++m) out[m] = mode(m);
  return out;
}

double dispersion(double k, double meson_mass) { return std::sqrt(k * k + meson_mass * meson_mass); }

RVector gaussian_cutoff(const Grid& grid, double width, double scale) {
  RVector chi(grid.sites());
  for (int m = 0; m < grid.sites(); ++m) {
    const double k = grid.mode(m);
    chi[m] = scale * std::exp(-0.5 * k * k / (width * width));
  }
  chi[0] = 0.0;
  return chi;
}

RVector sharp_cutoff(const Grid& grid, double kappa, double scale) {
  RVector chi(grid.sites());
  for (int m = 0; m < grid.sites(); ++m) chi[m] = std::abs(grid.mode(m)) <= kappa ? scale : 0.0;
  chi[0] = 0.0;
  return chi;
}

RVector harmonic_potential(const Grid& grid, double strength) {
  RVector v(grid.sites());
  for (int j = 0; j < grid.sites(); ++j) v[j] = strength * grid.site(j) * grid.site(j);
  return v;
}

std::vector<int> centered_modes(const Grid& grid, int count) {
  if (count < 1 || count > grid.sites()) {
    throw ConfigInvalid("meson mode count must lie in [1, G], got " + std::to_string(count));
  }
  std::vector<int> modes;
  const int first = grid.sites() / 2 - count / 2;
  for (int i = 0; i < count; ++i) modes.push_back(first + i);
  return modes;
}

namespace {

void check_params(const Grid& grid, const ModelParams& params) {
  const auto g = grid.sites();
  if (params.cutoff.size() != g) throw ConfigInvalid("cutoff needs one sample per grid mode");
  if (params.potential.size() != g) throw ConfigInvalid("potential needs one sample per site");
  if (!(params.nucleon_mass > 0.0)) throw ConfigInvalid("nucleon_mass must be positive");
  if (!(params.meson_mass >= 0.0)) throw ConfigInvalid("meson_mass must be nonnegative");
  if (!(params.charge > 0.0)) throw ConfigInvalid("charge must be positive");
  for (int j = 0; j < g; ++j) {
    if (!(params.potential[j] >= 0.0)) throw ConfigInvalid("potential must be nonnegative");
  }
  for (int m = 0; m < g; ++m) {
    if (!(params.cutoff[m] >= 0.0)) throw ConfigInvalid("cutoff must be nonnegative");
    if (params.cutoff[m] != 0.0 && dispersion(grid.mode(m), params.meson_mass) == 0.0) {
      throw DegenerateDispersion("cutoff is nonzero on a mode with omega = 0 (k = " +
                                 std::to_string(grid.mode(m)) + ")");
    }
  }
}

}  // namespace

CMatrix coupling_form_factor(const Grid& grid, const ModelParams& params) {
  check_params(grid, params);
  const int g = grid.sites();
  CMatrix out(g, g);
  const double sdk = std::sqrt(grid.dk());
  for (int m = 0; m < g; ++m) {
    const double k = grid.mode(m);
    const double chi = params.cutoff[m];
    const double amp = chi == 0.0 ? 0.0 : sdk * chi / std::sqrt(dispersion(k, params.meson_mass));
    for (int j = 0; j < g; ++j) out(m, j) = amp * std::exp(-kI * (k * grid.site(j)));
  }
  return out;
}

CMatrix one_body_hamiltonian(const Grid& grid, const ModelParams& params) {
  check_params(grid, params);
  const int g = grid.sites();
  const SpectralTransform transform(grid);
  CMatrix kinetic(g, g);
  for (int j = 0; j < g; ++j) {
    CVector e = CVector::Zero(g);
    e[j] = 1.0;
    CVector modes = transform.forward(e);
    for (int m = 0; m < g; ++m) {
      const double k = grid.mode(m);
      modes[m] *= k * k / (2.0 * params.nucleon_mass);
    }
    kinetic.col(j) = transform.inverse(modes);
  }
  CMatrix a = 0.5 * (kinetic + kinetic.adjoint());
  for (int j = 0; j < g; ++j) a(j, j) += params.potential[j];
  return a;
}

SpectralTransform::SpectralTransform(const Grid& grid) : grid_(grid), sign_(grid.sites()) {
  for (int m = 0; m < grid.sites(); ++m) sign_[m] = ((m - grid.sites() / 2) % 2 == 0) ? 1.0 : -1.0;
}

CVector SpectralTransform::forward(const CVector& sites) const {
  const int g = grid_.sites();
  std::vector<Complex> in(sites.data(), sites.data() + g), out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  CVector modes(g);
  const double norm = 1.0 / std::sqrt(static_cast<double>(g));
  for (int m = 0; m < g; ++m) {
    const int q = ((m - g / 2) % g + g) % g;
    modes[m] = sign_[m] * norm * out[q];
  }
  return modes;
}

CVector SpectralTransform::inverse(const CVector& modes) const {
  const int g = grid_.sites();
  std::vector<Complex> in(g), out;
  for (int m = 0; m < g; ++m) {
    const int q = ((m - g / 2) % g + g) % g;
    in[q] = sign_[m] * modes[m];
  }
  Eigen::FFT<double> fft;
  fft.inv(out, in);
  CVector sites(g);
  const double norm = std::sqrt(static_cast<double>(g));
  for (int j = 0; j < g; ++j) sites[j] = norm * out[j];
  return sites;
}

CVector SpectralTransform::to_momentum(const CVector& sites) const {
  const double g = grid_.sites();
  return forward(sites) * (grid_.dx() * std::sqrt(g) / std::sqrt(2.0 * std::numbers::pi));
}

CVector SpectralTransform::from_momentum(const CVector& momentum) const {
  const double g = grid_.sites();
  return inverse(momentum) / (grid_.dx() * std::sqrt(g) / std::sqrt(2.0 * std::numbers::pi));
}

Discretization::Discretization(Grid grid, ModelParams params, std::vector<int> meson_modes)
    : grid_(grid),
      params_(std::move(params)),
      meson_modes_(std::move(meson_modes)),
      transform_(grid) {
  check_params(grid_, params_);
  const int g = grid_.sites();
  if (meson_modes_.empty()) throw ConfigInvalid("at least one meson mode is required");
  for (int m : meson_modes_) {
    if (m < 0 || m >= g) throw ConfigInvalid("meson mode index out of range");
  }
  const int nm = modes();
  x_ = grid_.sites_vector();
  k_.resize(nm);
  omega_.resize(nm);
  chi_.resize(nm);
  coupling_.resize(nm);
  const CMatrix full = coupling_form_factor(grid_, params_);
  form_factor_.resize(nm, g);
  for (int i = 0; i < nm; ++i) {
    const int m = meson_modes_[i];
    k_[i] = grid_.mode(m);
    omega_[i] = dispersion(k_[i], params_.meson_mass);
    chi_[i] = params_.cutoff[m];
    coupling_[i] = chi_[i] == 0.0 ? 0.0 : chi_[i] / std::sqrt(omega_[i]);
    form_factor_.row(i) = full.row(m);
  }
  one_body_ = one_body_hamiltonian(grid_, params_);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(one_body_);
  one_body_values_ = eig.eigenvalues();
  one_body_vectors_ = eig.eigenvectors();
}

CMatrix Discretization::one_body_propagator(double t) const {
  CVector phases(sites());
  for (int i = 0; i < sites(); ++i) phases[i] = std::exp(-kI * (t * one_body_values_[i]));
  return one_body_vectors_ * phases.asDiagonal() * one_body_vectors_.adjoint();
}

double Discretization::chi_over_sqrt_omega_norm() const {
  double s = 0.0;
  for (int i = 0; i < modes(); ++i) s += dk() * coupling_[i] * coupling_[i];
  return std::sqrt(s);
}

double Discretization::chi_over_omega_norm() const {
  double s = 0.0;
  for (int i = 0; i < modes(); ++i) {
    if (chi_[i] != 0.0) s += dk() * chi_[i] * chi_[i] / (omega_[i] * omega_[i]);
  }
  return std::sqrt(s);
}

}  // namespace nelson
