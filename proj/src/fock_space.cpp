#include "nelson/fock_space.hpp"

#include <cmath>
#include <string>

namespace nelson {

namespace {

void enumerate(int mode, int modes, int remaining, bool exact, Occupation& current,
               std::vector<Occupation>& out) {
  if (mode == modes - 1) {
    if (exact) {
      current[mode] = remaining;
      out.push_back(current);
    } else {
      for (int n = 0; n <= remaining; ++n) {
        current[mode] = n;
        out.push_back(current);
      }
    }
    return;
  }
  for (int n = 0; n <= remaining; ++n) {
    current[mode] = n;
    enumerate(mode + 1, modes, remaining - n, exact, current, out);
  }
}

Index binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<Index>(std::llround(r));
}

}  // namespace

FockBasis::FockBasis(BasisKind kind, int modes, int cap) : kind_(kind), modes_(modes), cap_(cap) {
  if (modes < 1) throw ConfigInvalid("Fock basis needs at least one mode");
  if (cap < 0) throw ConfigInvalid("Fock basis cap must be nonnegative");
  const double bits = modes * std::log2(static_cast<double>(cap) + 1.0);
  if (bits > 62.0) throw ConfigInvalid("Fock basis too large to index");
  Occupation current(modes, 0);
  enumerate(0, modes, cap, kind == BasisKind::nucleon_sector, current, states_);
  totals_.reserve(states_.size());
  lookup_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    int t = 0;
    for (int n : states_[i]) t += n;
    totals_.push_back(t);
    lookup_.emplace(key(states_[i]), static_cast<Index>(i));
  }
}

FockBasis FockBasis::sector(int modes, int n) { return FockBasis(BasisKind::nucleon_sector, modes, n); }

FockBasis FockBasis::truncated(BasisKind kind, int modes, int cap) {
  if (kind == BasisKind::nucleon_sector) throw ConfigInvalid("use FockBasis::sector for sector bases");
  return FockBasis(kind, modes, cap);
}

std::uint64_t FockBasis::key(const Occupation& occ) const {
  std::uint64_t k = 0;
  for (int n : occ) k = k * static_cast<std::uint64_t>(cap_ + 1) + static_cast<std::uint64_t>(n);
  return k;
}

Index FockBasis::index_of(const Occupation& occ) const {
  if (static_cast<int>(occ.size()) != modes_) return -1;
  int t = 0;
  for (int n : occ) {
    if (n < 0 || n > cap_) return -1;
    t += n;
  }
  if (t > cap_ || (is_sector() && t != cap_)) return -1;
  auto it = lookup_.find(key(occ));
  return it == lookup_.end() ? -1 : it->second;
}

Index expected_dimension(BasisKind kind, int modes, int cap) {
  if (kind == BasisKind::nucleon_sector) return binomial(cap + modes - 1, modes - 1);
  return binomial(cap + modes, modes);
}

SparseMatrix ladder(const FockBasis& basis, int mode, double eps, Ladder kind) {
  if (basis.is_sector()) throw SectorBasisUnsupported("ladder operators leave a fixed-number sector");
  if (mode < 0 || mode >= basis.modes()) throw ConfigInvalid("ladder mode out of range");
  const double s = std::sqrt(eps);
  std::vector<Triplet> trip;
  for (Index i = 0; i < basis.dimension(); ++i) {
    Occupation occ = basis.state(i);
    const int n = occ[mode];
    if (kind == Ladder::annihilate) {
      if (n == 0) continue;
      occ[mode] = n - 1;
      trip.emplace_back(basis.index_of(occ), i, s * std::sqrt(static_cast<double>(n)));
    } else {
      occ[mode] = n + 1;
      const Index j = basis.index_of(occ);
      if (j >= 0) trip.emplace_back(j, i, s * std::sqrt(static_cast<double>(n + 1)));
    }
  }
  SparseMatrix m(basis.dimension(), basis.dimension());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix second_quantize(const FockBasis& basis, const CMatrix& one_body, double eps) {
  if (one_body.rows() != basis.modes() || one_body.cols() != basis.modes()) {
    throw ConfigInvalid("one-body matrix does not match the basis modes");
  }
  std::vector<Triplet> trip;
  for (Index s = 0; s < basis.dimension(); ++s) {
    const Occupation& occ = basis.state(s);
    for (int j = 0; j < basis.modes(); ++j) {
      if (occ[j] == 0) continue;
      Occupation lowered = occ;
      lowered[j] -= 1;
      const double aj = std::sqrt(static_cast<double>(occ[j]));
      for (int i = 0; i < basis.modes(); ++i) {
        const Complex a = one_body(i, j);
        if (a == Complex(0.0)) continue;
        Occupation raised = lowered;
        raised[i] += 1;
        const Index t = basis.index_of(raised);
        trip.emplace_back(t, s, eps * a * aj * std::sqrt(static_cast<double>(raised[i])));
      }
    }
  }
  SparseMatrix m(basis.dimension(), basis.dimension());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

RVector second_quantize_diagonal(const FockBasis& basis, const RVector& d, double eps) {
  if (d.size() != basis.modes()) throw ConfigInvalid("diagonal does not match the basis modes");
  RVector out(basis.dimension());
  for (Index s = 0; s < basis.dimension(); ++s) {
    double v = 0.0;
    const Occupation& occ = basis.state(s);
    for (int m = 0; m < basis.modes(); ++m) v += occ[m] * d[m];
    out[s] = eps * v;
  }
  return out;
}

RVector number_diagonal(const FockBasis& basis, double eps) {
  RVector out(basis.dimension());
  for (Index s = 0; s < basis.dimension(); ++s) out[s] = eps * basis.total(s);
  return out;
}

SparseMatrix diagonal_matrix(const CVector& d) {
  SparseMatrix m(d.size(), d.size());
  std::vector<Triplet> trip;
  for (Index i = 0; i < d.size(); ++i) {
    if (d[i] != Complex(0.0)) trip.emplace_back(i, i, d[i]);
  }
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix identity_matrix(Index n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

SpacePtr make_space(FockBasis nucleon, FockBasis meson) {
  if (nucleon.kind() == BasisKind::meson_truncated || meson.kind() != BasisKind::meson_truncated) {
    throw ConfigInvalid("product space needs a nucleon basis on the left and a meson basis on the right");
  }
  return std::make_shared<const ProductSpace>(ProductSpace{std::move(nucleon), std::move(meson)});
}

Factor Factor::diagonal(CVector d) {
  Factor f;
  f.kind = Kind::diagonal;
  f.diag = std::move(d);
  return f;
}

Factor Factor::matrix(SparseMatrix m) {
  Factor f;
  f.kind = Kind::sparse;
  f.sparse = std::move(m);
  return f;
}

SparseMatrix Factor::as_sparse(Index n) const {
  switch (kind) {
    case Kind::identity:
      return identity_matrix(n);
    case Kind::diagonal:
      return diagonal_matrix(diag);
    default:
      return sparse;
  }
}

Factor Factor::adjoint() const {
  switch (kind) {
    case Kind::identity:
      return *this;
    case Kind::diagonal:
      return diagonal(diag.conjugate());
    default:
      return matrix(SparseMatrix(sparse.adjoint()));
  }
}

void TensorOperator::add(Complex c, Factor left, Factor right) {
  if (c == Complex(0.0)) return;
  if (left.kind == Factor::Kind::diagonal && left.diag.size() != left_dim_) throw ConfigInvalid("left factor size");
  if (left.kind == Factor::Kind::sparse && left.sparse.rows() != left_dim_) throw ConfigInvalid("left factor size");
  if (right.kind == Factor::Kind::diagonal && right.diag.size() != right_dim_) {
    throw ConfigInvalid("right factor size");
  }
  if (right.kind == Factor::Kind::sparse && right.sparse.rows() != right_dim_) {
    throw ConfigInvalid("right factor size");
  }
  terms_.push_back({c, std::move(left), std::move(right)});
}

void TensorOperator::add(const TensorOperator& other, Complex scale) {
  if (other.left_dim_ != left_dim_ || other.right_dim_ != right_dim_) throw ConfigInvalid("operator size mismatch");
  for (const auto& t : other.terms_) add(scale * t.coeff, t.left, t.right);
}

void TensorOperator::apply(const CVector& x, CVector& y) const {
  y.setZero(dimension());
  Eigen::Map<const CMatrix> xm(x.data(), right_dim_, left_dim_);
  Eigen::Map<CMatrix> ym(y.data(), right_dim_, left_dim_);
  CMatrix rx;
  for (const auto& t : terms_) {
    const CMatrix* src = nullptr;
    switch (t.right.kind) {
      case Factor::Kind::identity:
        break;
      case Factor::Kind::diagonal:
        rx = t.right.diag.asDiagonal() * xm;
        src = &rx;
        break;
      case Factor::Kind::sparse:
        rx = t.right.sparse * xm;
        src = &rx;
        break;
    }
    switch (t.left.kind) {
      case Factor::Kind::identity:
        if (src) {
          ym += t.coeff * (*src);
        } else {
          ym += t.coeff * xm;
        }
        break;
      case Factor::Kind::diagonal:
        if (src) {
          ym += t.coeff * ((*src) * t.left.diag.asDiagonal());
        } else {
          ym += t.coeff * (xm * t.left.diag.asDiagonal());
        }
        break;
      case Factor::Kind::sparse:
        if (src) {
          ym += t.coeff * ((*src) * t.left.sparse.transpose());
        } else {
          ym += t.coeff * (xm * t.left.sparse.transpose());
        }
        break;
    }
  }
}

CVector TensorOperator::apply(const CVector& x) const {
  CVector y;
  apply(x, y);
  return y;
}

TensorOperator TensorOperator::adjoint() const {
  TensorOperator out(left_dim_, right_dim_);
  for (const auto& t : terms_) out.add(std::conj(t.coeff), t.left.adjoint(), t.right.adjoint());
  return out;
}

SparseMatrix TensorOperator::assemble() const {
  std::vector<Triplet> trip;
  for (const auto& t : terms_) {
    const SparseMatrix l = t.left.as_sparse(left_dim_);
    const SparseMatrix r = t.right.as_sparse(right_dim_);
    for (Index a = 0; a < l.outerSize(); ++a) {
      for (SparseMatrix::InnerIterator il(l, a); il; ++il) {
        for (Index c = 0; c < r.outerSize(); ++c) {
          for (SparseMatrix::InnerIterator ir(r, c); ir; ++ir) {
            trip.emplace_back(il.row() * right_dim_ + ir.row(), il.col() * right_dim_ + ir.col(),
                              t.coeff * il.value() * ir.value());
          }
        }
      }
    }
  }
  SparseMatrix m(dimension(), dimension());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

CMatrix TensorOperator::dense() const { return CMatrix(assemble()); }

std::vector<Index> embedding(const FockBasis& small, const FockBasis& big) {
  if (small.modes() != big.modes()) throw ConfigInvalid("embedding needs equal mode counts");
  std::vector<Index> map(small.dimension());
  for (Index i = 0; i < small.dimension(); ++i) {
    map[i] = big.index_of(small.state(i));
    if (map[i] < 0) throw ConfigInvalid("basis is not contained in the larger basis");
  }
  return map;
}

}  // namespace nelson
