#pragma once

#include <random>

#include "nelson/discretization.hpp"
#include "nelson/field_state.hpp"
#include "nelson/fock_space.hpp"

namespace fixtures {

struct ModelSpec {
  int sites = 8;
  double half_length = 4.0;
  int modes = 4;
  double chi_scale = 0.5;
  double chi_width = 1.5;
  double trap = 0.25;
  double nucleon_mass = 1.0;
  double meson_mass = 1.0;
  double charge = 1.0;
};

inline nelson::Discretization model(const ModelSpec& s) {
  nelson::Grid grid(s.half_length, s.sites);
  nelson::ModelParams p;
  p.nucleon_mass = s.nucleon_mass;
  p.meson_mass = s.meson_mass;
  p.charge = s.charge;
  p.cutoff = nelson::gaussian_cutoff(grid, s.chi_width, s.chi_scale);
  p.potential = nelson::harmonic_potential(grid, s.trap);
  return nelson::Discretization(grid, p, nelson::centered_modes(grid, s.modes));
}

inline nelson::Discretization model(int sites, int modes, double chi_scale) {
  ModelSpec s;
  s.sites = sites;
  s.modes = modes;
  s.chi_scale = chi_scale;
  s.half_length = sites / 2.0;
  return model(s);
}

inline double relative(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

inline nelson::SpacePtr sector_space(const nelson::Discretization& disc, int n, int m_max) {
  return nelson::make_space(nelson::FockBasis::sector(disc.sites(), n),
                            nelson::FockBasis::truncated(nelson::BasisKind::meson_truncated, disc.modes(), m_max));
}

inline nelson::SpacePtr truncated_space(const nelson::Discretization& disc, int n_max, int m_max) {
  return nelson::make_space(nelson::FockBasis::truncated(nelson::BasisKind::nucleon_truncated, disc.sites(), n_max),
                            nelson::FockBasis::truncated(nelson::BasisKind::meson_truncated, disc.modes(), m_max));
}

}  // namespace fixtures
