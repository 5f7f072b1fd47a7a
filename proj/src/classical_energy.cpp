#include "nelson/classical_energy.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace nelson {

namespace {

double weighted_real_inner(double w, const CVector& a, const CVector& b) {
  return w * a.dot(b).real();
}

}  // namespace

CVector density_transform(const Discretization& disc, const CVector& z1) {
  CVector rho(disc.modes());
  const RVector& k = disc.k();
  const RVector& x = disc.x();
  for (int m = 0; m < disc.modes(); ++m) {
    Complex s = 0.0;
    for (int j = 0; j < disc.sites(); ++j) s += std::exp(-kI * (k[m] * x[j])) * std::norm(z1[j]);
    rho[m] = disc.dx() * s;
  }
  return rho;
}

RVector meson_potential(const Discretization& disc, const CVector& w) {
  const CVector s = disc.form_factor().adjoint() * w;
  return 2.0 * std::sqrt(disc.dk()) * s.real();
}

EnergyBreakdown evaluate_h(const Discretization& disc, const FieldState& z) {
  EnergyBreakdown e;
  e.h0_nucleon = disc.dx() * z.z1.dot(disc.one_body() * z.z1).real();
  for (int m = 0; m < disc.modes(); ++m) e.h0_meson += disc.dk() * disc.omega()[m] * std::norm(z.z2[m]);
  const CVector rho = density_transform(disc, z.z1);
  for (int m = 0; m < disc.modes(); ++m) {
    e.h_interaction += 2.0 * disc.dk() * disc.coupling()[m] * (std::conj(z.z2[m]) * rho[m]).real();
  }
  e.total = e.h0_nucleon + e.h0_meson + e.h_interaction;
  return e;
}

CVector meson_gradient(const Discretization& disc, const FieldState& z) {
  const CVector rho = density_transform(disc, z.z1);
  CVector g(disc.modes());
  for (int m = 0; m < disc.modes(); ++m) g[m] = disc.omega()[m] * z.z2[m] + disc.coupling()[m] * rho[m];
  return g;
}

CVector eliminate_meson(const Discretization& disc, const CVector& z1) {
  const CVector rho = density_transform(disc, z1);
  CVector z2 = CVector::Zero(disc.modes());
  for (int m = 0; m < disc.modes(); ++m) {
    const double chi = disc.chi()[m];
    if (chi == 0.0) continue;
    const double w = disc.omega()[m];
    if (w == 0.0) throw DegenerateDispersion("omega vanishes on a coupled mode");
    z2[m] = -chi * rho[m] / (w * std::sqrt(w));
  }
  return z2;
}

double reduced_functional(const Discretization& disc, const CVector& z1) {
  double value = disc.dx() * z1.dot(disc.one_body() * z1).real();
  const CVector rho = density_transform(disc, z1);
  for (int m = 0; m < disc.modes(); ++m) {
    const double chi = disc.chi()[m];
    if (chi == 0.0) continue;
    const double r = chi / disc.omega()[m];
    value -= disc.dk() * r * r * std::norm(rho[m]);
  }
  return value;
}

CVector reduced_gradient(const Discretization& disc, const CVector& z1) {
  const RVector u = meson_potential(disc, eliminate_meson(disc, z1));
  return 2.0 * (disc.one_body() * z1 + (u.cast<Complex>().array() * z1.array()).matrix());
}

double energy_lower_bound(const Discretization& disc) {
  const double lam = disc.charge();
  const double c = disc.chi_over_omega_norm();
  return -lam * lam * lam * lam * c * c;
}

CVector fix_phase(const CVector& z1) {
  const Complex s = z1.sum();
  if (std::abs(s) == 0.0) return z1;
  return z1 * (std::conj(s) / std::abs(s));
}

MinimizationResult descend(const Discretization& disc, const CVector& seed,
                           const MinimizationOptions& options) {
  const double lam = disc.charge();
  const double dx = disc.dx();
  auto retract = [&](const CVector& v) { return CVector(v * (lam / nucleon_norm(disc, v))); };
  auto project = [&](const CVector& z, const CVector& g) {
    return CVector(g - (weighted_real_inner(dx, z, g) / (lam * lam)) * z);
  };

  MinimizationResult result;
  result.lower_bound = energy_lower_bound(disc);
  CVector z = retract(seed);
  double value = reduced_functional(disc, z);
  CVector pg = project(z, reduced_gradient(disc, z));
  double gnorm = std::sqrt(dx) * pg.norm();
  result.history.push_back(value);

  double step = 1.0 / (disc.one_body_eigenvalues().cwiseAbs().maxCoeff() + 1.0);
  int it = 0;
  for (; it < options.max_iterations && gnorm > options.tolerance; ++it) {
    double trial = step;
    CVector z_new;
    double v_new = 0.0;
    bool accepted = false;
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(value));
    while (trial > 1e-18) {
      z_new = retract(z - trial * pg);
      v_new = reduced_functional(disc, z_new);
      if (v_new <= value - 1e-4 * trial * gnorm * gnorm + slack && v_new <= value + slack) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;
    const CVector pg_new = project(z_new, reduced_gradient(disc, z_new));
    const CVector dz = z_new - z;
    const CVector dg = pg_new - pg;
    const double sy = weighted_real_inner(dx, dz, dg);
    const double ss = weighted_real_inner(dx, dz, dz);
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-6, 1e3) : 2.0 * trial;
    z = z_new;
    value = v_new;
    pg = pg_new;
    gnorm = std::sqrt(dx) * pg.norm();
    result.history.push_back(value);
  }

  result.iterations = it;
  result.converged = gnorm <= options.tolerance;
  result.grad_norm = gnorm;
  result.value = value;
  result.minimizer.z1 = z;
  result.minimizer.z2 = eliminate_meson(disc, z);
  return result;
}

MinimizationResult minimize_constrained(const Discretization& disc,
                                        const MinimizationOptions& options,
                                        const std::optional<CVector>& seed) {
  if (!(disc.charge() > 0.0) || !(options.tolerance > 0.0)) {
    throw ConfigInvalid("minimization needs positive charge and tolerance");
  }
  std::vector<CVector> seeds;
  if (seed) {
    seeds.push_back(*seed);
  } else {
    seeds.push_back(disc.one_body_eigenvectors().col(0));
    CVector bump(disc.sites());
    const double width = 0.25 * disc.grid().half_length();
    for (int j = 0; j < disc.sites(); ++j) {
      const double x = disc.x()[j] / width;
      bump[j] = std::exp(-0.5 * x * x);
    }
    seeds.push_back(bump);
    std::mt19937_64 rng(options.seed);
    seeds.push_back(random_vector(disc.sites(), rng));
  }

  std::vector<std::future<MinimizationResult>> jobs;
  for (const auto& s : seeds) {
    jobs.push_back(std::async(std::launch::async, [&disc, &options, s] { return descend(disc, s, options); }));
  }
  MinimizationResult best;
  bool have = false;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    MinimizationResult r = jobs[i].get();
    r.start_index = static_cast<int>(i);
    if (!have || r.value < best.value) {
      best = std::move(r);
      have = true;
    }
  }
  best.minimizer.z1 = fix_phase(best.minimizer.z1);
  best.minimizer.z2 = eliminate_meson(disc, best.minimizer.z1);
  return best;
}

}  // namespace nelson
