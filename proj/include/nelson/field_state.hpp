#pragma once

#include <cstdint>
#include <random>

#include "nelson/discretization.hpp"

namespace nelson {

/// Classical phase-space point z = z1 + z2: nucleon amplitudes on sites,
/// meson amplitudes on the selected modes.
struct FieldState {
  CVector z1;
  CVector z2;
};

FieldState zero_state(const Discretization& disc);

/// Quadrature-weighted norms and inner product on Z = L2 + L2.
double nucleon_norm(const Discretization& disc, const CVector& z1);
double meson_norm(const Discretization& disc, const CVector& z2);
double norm(const Discretization& disc, const FieldState& z);
/// <a, b>, antilinear in a.
Complex inner(const Discretization& disc, const FieldState& a, const FieldState& b);

FieldState operator+(const FieldState& a, const FieldState& b);
FieldState operator-(const FieldState& a, const FieldState& b);
FieldState operator*(Complex s, const FieldState& a);

/// Gaussian random state rescaled to the requested norms.
FieldState random_state(const Discretization& disc, std::mt19937_64& rng, double z1_norm,
                        double z2_norm);
CVector random_vector(Index n, std::mt19937_64& rng);

}  // namespace nelson
