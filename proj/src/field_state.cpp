#include "nelson/field_state.hpp"

#include <cmath>

namespace nelson {

FieldState zero_state(const Discretization& disc) {
  return {CVector::Zero(disc.sites()), CVector::Zero(disc.modes())};
}

double nucleon_norm(const Discretization& disc, const CVector& z1) {
  return std::sqrt(disc.dx()) * z1.norm();
}

double meson_norm(const Discretization& disc, const CVector& z2) {
  return std::sqrt(disc.dk()) * z2.norm();
}

double norm(const Discretization& disc, const FieldState& z) {
  const double a = nucleon_norm(disc, z.z1);
  const double b = meson_norm(disc, z.z2);
  return std::sqrt(a * a + b * b);
}

Complex inner(const Discretization& disc, const FieldState& a, const FieldState& b) {
  return disc.dx() * a.z1.dot(b.z1) + disc.dk() * a.z2.dot(b.z2);
}

FieldState operator+(const FieldState& a, const FieldState& b) { return {a.z1 + b.z1, a.z2 + b.z2}; }

FieldState operator-(const FieldState& a, const FieldState& b) { return {a.z1 - b.z1, a.z2 - b.z2}; }

FieldState operator*(Complex s, const FieldState& a) { return {s * a.z1, s * a.z2}; }

CVector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = Complex(normal(rng), normal(rng));
  return v;
}

FieldState random_state(const Discretization& disc, std::mt19937_64& rng, double z1_norm,
                        double z2_norm) {
  FieldState z{random_vector(disc.sites(), rng), random_vector(disc.modes(), rng)};
  z.z1 *= z1_norm / nucleon_norm(disc, z.z1);
  z.z2 *= z2_norm / meson_norm(disc, z.z2);
  return z;
}

}  // namespace nelson
