#include "nelson/operator_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "nelson/classical_dynamics.hpp"
#include "nelson/quantum_dynamics.hpp"

namespace nelson {

namespace {

double ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

// max over configurations of sqrt(sum_m dk |f_cm|^2 w_m).
double sup_norm(const CMatrix& f, const RVector& w, double dk) {
  double best = 0.0;
  for (Index c = 0; c < f.rows(); ++c) {
    double s = 0.0;
    for (Index m = 0; m < f.cols(); ++m) s += dk * std::norm(f(c, m)) * w[m];
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

CVector lift_right(const RVector& d, Index left_dim) {
  CVector out(left_dim * d.size());
  for (Index i = 0; i < left_dim; ++i) out.segment(i * d.size(), d.size()) = d.cast<Complex>();
  return out;
}

CMatrix random_matrix(int n, std::mt19937_64& rng) {
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j) m.col(j) = random_vector(n, rng);
  return m;
}

}  // namespace

CMatrix configuration_kernel(const Discretization& disc, const FockBasis& sector, const CVector& h) {
  if (!sector.is_sector() || sector.cap() == 0) throw ConfigInvalid("configuration kernels need a sector with n >= 1");
  const double n = sector.cap();
  CMatrix f = CMatrix::Zero(sector.dimension(), disc.modes());
  for (Index c = 0; c < sector.dimension(); ++c) {
    const Occupation& occ = sector.state(c);
    for (int m = 0; m < disc.modes(); ++m) {
      Complex v = 0.0;
      for (int j = 0; j < disc.sites(); ++j) {
        if (occ[j] != 0) v += static_cast<double>(occ[j]) * std::exp(-kI * disc.k()[m] * disc.x()[j]);
      }
      f(c, m) = h[m] * v / n;
    }
  }
  return f;
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

CMatrix conjugate_core(const CMatrix& w_core_columns, const SparseMatrix& x) {
  const CMatrix xw = x * w_core_columns;
  return w_core_columns.adjoint() * xw;
}

std::vector<BoundCheck> check_relative_bounds(const Discretization& disc, double eps, const BoundOptions& options) {
  const int samples = options.samples;
  std::mt19937_64 rng(options.seed);
  const SpacePtr space = make_space(FockBasis::sector(disc.sites(), options.nucleons),
                                    FockBasis::truncated(BasisKind::meson_truncated, disc.modes(), options.meson_cap));
  const FockBasis& nuc = space->nucleon;
  const FockBasis& mes = space->meson;
  const Index d1 = nuc.dimension();
  const Index d2 = mes.dimension();
  const Index dim = space->dimension();
  const double dk = disc.dk();

  const CVector h02 = lift_right(second_quantize_diagonal(mes, disc.omega(), eps), d1);
  const CVector n2 = lift_right(number_diagonal(mes, eps), d1);
  RVector inv_omega(disc.modes());
  for (int m = 0; m < disc.modes(); ++m) inv_omega[m] = disc.omega()[m] > 0.0 ? 1.0 / disc.omega()[m] : 0.0;

  // Two kernels: the physical coupling profile and a random profile.
  CVector random_h = random_vector(disc.modes(), rng);
  for (int m = 0; m < disc.modes(); ++m) {
    if (disc.omega()[m] == 0.0) random_h[m] = 0.0;
  }
  const std::vector<CVector> profiles = {disc.coupling().cast<Complex>(), random_h};

  BoundCheck eq_ann_h{"annihilation_vs_H02", 0.0, 0};
  BoundCheck eq_cre_h{"creation_vs_H02", 0.0, 0};
  BoundCheck eq_ann_n{"annihilation_vs_N2", 0.0, 0};
  BoundCheck eq_cre_n{"creation_vs_N2", 0.0, 0};
  for (const CVector& h : profiles) {
    const CMatrix f = configuration_kernel(disc, nuc, h);
    const double sup = sup_norm(f, RVector::Ones(disc.modes()), dk);
    const double sup_w = sup_norm(f, inv_omega, dk);
    TensorOperator ann(d1, d2), cre(d1, d2);
    for (int m = 0; m < disc.modes(); ++m) {
      const CVector col = std::sqrt(dk) * f.col(m);
      ann.add(1.0, Factor::diagonal(col.conjugate()), Factor::matrix(ladder(mes, m, eps, Ladder::annihilate)));
      cre.add(1.0, Factor::diagonal(col), Factor::matrix(ladder(mes, m, eps, Ladder::create)));
    }
    for (int s = 0; s < samples; ++s) {
      CVector phi = random_vector(dim, rng);
      phi /= phi.norm();
      const double a = ann.apply(phi).squaredNorm();
      const double c = cre.apply(phi).squaredNorm();
      const double e02 = phi.dot(h02.cwiseProduct(phi)).real();
      const double en2 = phi.dot(n2.cwiseProduct(phi)).real();
      eq_ann_h.max_ratio = std::max(eq_ann_h.max_ratio, ratio(a, sup_w * sup_w * e02));
      eq_cre_h.max_ratio = std::max(eq_cre_h.max_ratio, ratio(c, sup_w * sup_w * e02 + eps * sup * sup));
      eq_ann_n.max_ratio = std::max(eq_ann_n.max_ratio, ratio(std::sqrt(a), sup * std::sqrt(en2)));
      eq_cre_n.max_ratio = std::max(eq_cre_n.max_ratio, ratio(std::sqrt(c), sup * std::sqrt(en2 + eps)));
    }
  }
  for (BoundCheck* b : {&eq_ann_h, &eq_cre_h, &eq_ann_n, &eq_cre_n}) b->samples = samples * 2;

  BoundCheck cor{"interaction_vs_number", 0.0, samples};
  {
    const HamiltonianSet hs = assemble(disc, space, eps);
    const CVector t = number_weight(*space, eps).cast<Complex>();
    const double c = disc.chi_over_sqrt_omega_norm();
    for (int s = 0; s < samples; ++s) {
      const CVector phi = random_vector(dim, rng);
      cor.max_ratio = std::max(cor.max_ratio, ratio(hs.hi.apply(phi).norm(), c * t.cwiseProduct(phi).norm()));
    }
  }

  BoundCheck rel{"dgamma_relative", 0.0, samples};
  {
    const int modes = disc.modes();
    const CMatrix y1 = random_matrix(modes, rng);
    const CMatrix b = random_matrix(modes, rng);
    const CMatrix y2 = b.adjoint() * b / static_cast<double>(modes);
    const CMatrix eye = CMatrix::Identity(modes, modes);
    const double c = (1.0 + std::sqrt(2.0)) * spectral_norm((y2 + eye).inverse() * y1);
    const CMatrix lhs_den =
        CMatrix(second_quantize(mes, y2.adjoint() * y2 + eye, eps)) + CMatrix::Identity(d2, d2);
    const Eigen::LLT<CMatrix> solver(lhs_den);
    const SparseMatrix dg1 = second_quantize(mes, y1, eps);
    for (int s = 0; s < samples; ++s) {
      const CVector phi = random_vector(d2, rng);
      const CVector k = solver.solve(CVector(dg1 * phi));
      rel.max_ratio = std::max(rel.max_ratio, ratio(k.norm(), c * phi.norm()));
    }
  }

  BoundCheck field{"interaction_field", 0.0, samples};
  {
    std::uniform_real_distribution<double> radius(0.05, 2.0);
    const double c = 2.0 * disc.chi_over_sqrt_omega_norm();
    for (int s = 0; s < samples; ++s) {
      const FieldState z = random_state(disc, rng, radius(rng), radius(rng));
      const double n1 = nucleon_norm(disc, z.z1);
      const double n2z = meson_norm(disc, z.z2);
      field.max_ratio =
          std::max(field.max_ratio, ratio(norm(disc, interaction_field(disc, z)), c * n1 * (n1 + n2z)));
    }
  }

  return {eq_ann_h, eq_cre_h, eq_ann_n, eq_cre_n, cor, rel, field};
}

double weyl_dgamma_residual(BasisKind kind, int modes, int core_cap, int margin, const CVector& xi,
                            const CMatrix& y, double weight, double eps) {
  const FockBasis core = FockBasis::truncated(kind, modes, core_cap);
  const FockBasis big = FockBasis::truncated(kind, modes, core_cap + margin);
  const std::vector<Index> idx = embedding(core, big);
  const CMatrix w = weyl_factor(big, xi, weight, eps);
  const CMatrix wc = w(Eigen::all, idx);
  const CMatrix lhs = conjugate_core(wc, second_quantize(big, y, eps));

  const CVector yxi = y * xi;
  const double sw = std::sqrt(weight);
  SparseMatrix field(core.dimension(), core.dimension());
  for (int m = 0; m < modes; ++m) {
    field += (sw * yxi[m]) * ladder(core, m, eps, Ladder::create) -
             (sw * std::conj(yxi[m])) * ladder(core, m, eps, Ladder::annihilate);
  }
  const Complex scalar = 0.5 * eps * eps * weight * xi.dot(yxi);
  CMatrix rhs = CMatrix(second_quantize(core, y, eps)) + (kI * eps / std::sqrt(2.0)) * CMatrix(field);
  rhs += scalar * CMatrix::Identity(core.dimension(), core.dimension());
  return spectral_norm(lhs - rhs);
}

InteractionConjugation weyl_interaction_residuals(const Discretization& disc, int n_core, int m_core, int margin,
                                                  const FieldState& xi, double eps) {
  const FockBasis nuc_core = FockBasis::truncated(BasisKind::nucleon_truncated, disc.sites(), n_core);
  const FockBasis nuc_big = FockBasis::truncated(BasisKind::nucleon_truncated, disc.sites(), n_core + margin);
  const FockBasis mes_core = FockBasis::truncated(BasisKind::meson_truncated, disc.modes(), m_core);
  const FockBasis mes_big = FockBasis::truncated(BasisKind::meson_truncated, disc.modes(), m_core + margin);
  const std::vector<Index> idx1 = embedding(nuc_core, nuc_big);
  const std::vector<Index> idx2 = embedding(mes_core, mes_big);

  const CMatrix w1 = CMatrix(weyl_factor(nuc_big, xi.z1, disc.dx(), eps))(Eigen::all, idx1);
  const CMatrix w2 = CMatrix(weyl_factor(mes_big, xi.z2, disc.dk(), eps))(Eigen::all, idx2);

  std::vector<CMatrix> up, down;
  for (int m = 0; m < disc.modes(); ++m) {
    up.push_back(conjugate_core(w2, ladder(mes_big, m, eps, Ladder::create)));
    down.push_back(conjugate_core(w2, ladder(mes_big, m, eps, Ladder::annihilate)));
  }

  const CMatrix& g = disc.form_factor();
  const Index dim = nuc_core.dimension() * mes_core.dimension();
  CMatrix lhs = CMatrix::Zero(dim, dim);
  for (int j = 0; j < disc.sites(); ++j) {
    CVector occ(nuc_big.dimension());
    for (Index s = 0; s < nuc_big.dimension(); ++s) occ[s] = eps * nuc_big.state(s)[j];
    const CMatrix q = conjugate_core(w1, diagonal_matrix(occ));
    CMatrix phi = CMatrix::Zero(mes_core.dimension(), mes_core.dimension());
    for (int m = 0; m < disc.modes(); ++m) phi += g(m, j) * up[m] + std::conj(g(m, j)) * down[m];
    lhs += Eigen::kroneckerProduct(q, phi).eval();
  }

  const SpacePtr space = make_space(nuc_core, mes_core);
  const CMatrix shifted = shifted_interaction(disc, space, xi, eps).dense();
  const CMatrix hi = assemble(disc, space, eps).hi.dense();
  const BOperators b = b_operators(disc, space, xi, eps);
  const CMatrix b0 = b.b0.dense();
  const CMatrix expansion = b0 + eps * b.b1.dense() + eps * eps * b.b2 * CMatrix::Identity(dim, dim);

  InteractionConjugation out;
  out.shifted_residual = spectral_norm(lhs - shifted);
  out.expansion_residual = spectral_norm((kI / eps) * (lhs - hi) - expansion);
  out.scale = spectral_norm(b0);
  return out;
}

}  // namespace nelson
