#include "nelson/weyl.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace nelson {

CMatrix displacement_elements(Complex beta, int cap) {
  if (beta == Complex(0.0)) return CMatrix::Identity(cap + 1, cap + 1);
  const int pad = 40 + static_cast<int>(std::ceil(8.0 * std::norm(beta) + 8.0 * std::abs(beta)));
  const int k = cap + pad;
  CMatrix gen = CMatrix::Zero(k + 1, k + 1);
  for (int n = 0; n < k; ++n) {
    const double s = std::sqrt(static_cast<double>(n + 1));
    gen(n + 1, n) += beta * s;
    gen(n, n + 1) -= std::conj(beta) * s;
  }
  const CMatrix d = gen.exp();
  return d.topLeftCorner(cap + 1, cap + 1);
}

CMatrix weyl_factor(const FockBasis& basis, const CVector& xi, double weight, double eps) {
  if (xi.size() != basis.modes()) throw ConfigInvalid("Weyl argument does not match the basis modes");
  const Index dim = basis.dimension();
  if (xi.isZero(0.0)) return CMatrix::Identity(dim, dim);
  if (basis.is_sector()) throw SectorBasisUnsupported("Weyl operators with xi1 != 0 leave a nucleon sector");

  const double s = std::sqrt(0.5 * eps * weight);
  std::vector<CMatrix> single;
  for (int m = 0; m < basis.modes(); ++m) single.push_back(displacement_elements(kI * s * xi[m], basis.cap()));

  CMatrix w(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const Occupation& oi = basis.state(i);
    for (Index j = 0; j < dim; ++j) {
      const Occupation& oj = basis.state(j);
      Complex v = 1.0;
      for (int m = 0; m < basis.modes() && v != Complex(0.0); ++m) v *= single[m](oi[m], oj[m]);
      w(i, j) = v;
    }
  }
  return w;
}

WeylOperator::WeylOperator(SpacePtr space, CMatrix nucleon, CMatrix meson, bool nucleon_identity,
                           bool meson_identity)
    : space_(std::move(space)),
      nucleon_(std::move(nucleon)),
      meson_(std::move(meson)),
      nucleon_identity_(nucleon_identity),
      meson_identity_(meson_identity) {}

CVector WeylOperator::apply(const CVector& x) const {
  const Index d1 = space_->nucleon.dimension();
  const Index d2 = space_->meson.dimension();
  Eigen::Map<const CMatrix> xm(x.data(), d2, d1);
  CMatrix y = meson_identity_ ? CMatrix(xm) : CMatrix(meson_ * xm);
  if (!nucleon_identity_) y = y * nucleon_.transpose();
  return Eigen::Map<CVector>(y.data(), d1 * d2);
}

CVector WeylOperator::apply_adjoint(const CVector& x) const {
  const Index d1 = space_->nucleon.dimension();
  const Index d2 = space_->meson.dimension();
  Eigen::Map<const CMatrix> xm(x.data(), d2, d1);
  CMatrix y = meson_identity_ ? CMatrix(xm) : CMatrix(meson_.adjoint() * xm);
  if (!nucleon_identity_) y = y * nucleon_.conjugate();
  return Eigen::Map<CVector>(y.data(), d1 * d2);
}

Complex WeylOperator::expectation(const CVector& psi) const { return psi.dot(apply(psi)); }

WeylOperator weyl(const Discretization& disc, const SpacePtr& space, const FieldState& xi, double eps) {
  const bool n_id = xi.z1.isZero(0.0);
  const bool m_id = xi.z2.isZero(0.0);
  if (!n_id && space->nucleon.is_sector()) {
    throw SectorBasisUnsupported("Weyl operators with xi1 != 0 leave a nucleon sector");
  }
  CMatrix w1 = n_id ? CMatrix() : weyl_factor(space->nucleon, xi.z1, disc.dx(), eps);
  CMatrix w2 = m_id ? CMatrix() : weyl_factor(space->meson, xi.z2, disc.dk(), eps);
  return WeylOperator(space, std::move(w1), std::move(w2), n_id, m_id);
}

CVector coherent_factor(const FockBasis& basis, const CVector& alpha) {
  if (alpha.size() != basis.modes()) throw ConfigInvalid("coherent amplitude does not match the basis modes");
  CVector out(basis.dimension());
  double pre = 0.0;
  for (int m = 0; m < basis.modes(); ++m) pre += std::norm(alpha[m]);
  pre = std::exp(-0.5 * pre);
  for (Index s = 0; s < basis.dimension(); ++s) {
    const Occupation& occ = basis.state(s);
    Complex v = pre;
    for (int m = 0; m < basis.modes(); ++m) {
      for (int q = 1; q <= occ[m]; ++q) v *= alpha[m] / std::sqrt(static_cast<double>(q));
    }
    out[s] = v;
  }
  return out;
}

CVector sector_product_factor(const FockBasis& basis, const CVector& u) {
  if (!basis.is_sector()) throw ConfigInvalid("sector product needs a sector basis");
  if (u.size() != basis.modes()) throw ConfigInvalid("one-body vector does not match the basis modes");
  CVector out(basis.dimension());
  for (Index s = 0; s < basis.dimension(); ++s) {
    const Occupation& occ = basis.state(s);
    // sqrt(n!/prod n_j!) prod u_j^{n_j}, accumulated as a product of ratios.
    Complex v = 1.0;
    int placed = 0;
    for (int j = 0; j < basis.modes(); ++j) {
      for (int q = 1; q <= occ[j]; ++q) {
        ++placed;
        v *= u[j] * std::sqrt(static_cast<double>(placed) / q);
      }
    }
    out[s] = v;
  }
  return out;
}

QuantumState coherent_state(const Discretization& disc, const SpacePtr& space, const FieldState& z, double eps,
                            double deficit_cap) {
  if (!(eps > 0.0)) throw ConfigInvalid("eps must be positive");
  const CVector alpha2 = z.z2 * std::sqrt(disc.dk() / eps);
  const CVector meson = coherent_factor(space->meson, alpha2);

  CVector nucleon;
  if (space->nucleon.is_sector()) {
    const double norm1 = nucleon_norm(disc, z.z1);
    const int n = space->nucleon.cap();
    if (std::abs(n * eps - norm1 * norm1) > 1e-9 * std::max(1.0, norm1 * norm1)) {
      throw ConfigInvalid("sector coherent vector needs n eps = ||z1||^2");
    }
    if (n == 0) {
      nucleon = CVector::Ones(1);
    } else {
      nucleon = sector_product_factor(space->nucleon, z.z1 * (std::sqrt(disc.dx()) / norm1));
    }
  } else {
    nucleon = coherent_factor(space->nucleon, z.z1 * std::sqrt(disc.dx() / eps));
  }

  const double kept = nucleon.squaredNorm() * meson.squaredNorm();
  const double deficit = std::max(0.0, 1.0 - kept);
  if (deficit > deficit_cap) {
    throw TruncationInsufficient("coherent state loses " + std::to_string(deficit) +
                                 " of its norm to truncation (cap " + std::to_string(deficit_cap) + ")");
  }
  QuantumState st;
  st.space = space;
  st.eps = eps;
  st.deficit = deficit;
  st.amplitudes.resize(space->dimension());
  const Index d2 = space->meson.dimension();
  for (Index i1 = 0; i1 < space->nucleon.dimension(); ++i1) {
    st.amplitudes.segment(i1 * d2, d2) = nucleon[i1] * meson;
  }
  st.amplitudes /= st.amplitudes.norm();
  return st;
}

double poisson_tail(double mean, int cap) {
  if (mean <= 0.0) return 0.0;
  double tail = 0.0;
  const double lm = std::log(mean);
  for (int k = cap + 1;; ++k) {
    const double p = std::exp(-mean + k * lm - std::lgamma(k + 1.0));
    tail += p;
    if (k > mean && p < 1e-300 + 1e-18 * tail) break;
    if (k > cap + 10000) break;
  }
  return tail;
}

int poisson_cap(double mean, double tail) {
  int cap = 0;
  while (poisson_tail(mean, cap) > tail) ++cap;
  return cap;
}

}  // namespace nelson
