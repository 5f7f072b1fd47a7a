#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "nelson/types.hpp"

namespace nelson {

enum class BasisKind { nucleon_sector, nucleon_truncated, meson_truncated };

using Occupation = std::vector<int>;

/// Occupation-number basis of a symmetric Fock space over `modes` modes.
/// Sector bases fix the total occupation; truncated bases cap it. States
/// are enumerated in lexicographic order of their occupation vectors.
class FockBasis {
 public:
  static FockBasis sector(int modes, int n);
  static FockBasis truncated(BasisKind kind, int modes, int cap);

  BasisKind kind() const { return kind_; }
  bool is_sector() const { return kind_ == BasisKind::nucleon_sector; }
  int modes() const { return modes_; }
  int cap() const { return cap_; }  // n for sectors, n_max or m_max otherwise
  Index dimension() const { return static_cast<Index>(states_.size()); }

  const Occupation& state(Index i) const { return states_[i]; }
  int total(Index i) const { return totals_[i]; }
  /// -1 when the occupation is not in the basis.
  Index index_of(const Occupation& occ) const;

 private:
  FockBasis(BasisKind kind, int modes, int cap);
  std::uint64_t key(const Occupation& occ) const;

  BasisKind kind_;
  int modes_;
  int cap_;
  std::vector<Occupation> states_;
  std::vector<int> totals_;
  std::unordered_map<std::uint64_t, Index> lookup_;
};

/// Number of occupation vectors: multiset count for sectors, capped sum otherwise.
Index expected_dimension(BasisKind kind, int modes, int cap);

enum class Ladder { annihilate, create };

/// sqrt(eps) times the standard ladder matrix. Transitions that leave a
/// truncated basis are dropped. Unavailable on sector bases.
SparseMatrix ladder(const FockBasis& basis, int mode, double eps, Ladder kind);

/// eps * sum_{ij} a_ij b_i^+ b_j, i.e. dGamma(a) with eps-scaled CCR.
SparseMatrix second_quantize(const FockBasis& basis, const CMatrix& one_body, double eps);

/// Diagonal of dGamma(diag(d)): eps * sum_m n_m d_m per basis state.
RVector second_quantize_diagonal(const FockBasis& basis, const RVector& d, double eps);

/// Diagonal of the eps-scaled number operator.
RVector number_diagonal(const FockBasis& basis, double eps);

SparseMatrix diagonal_matrix(const CVector& d);
SparseMatrix identity_matrix(Index n);

/// Nucleon (left) times meson (right) space. Product index i1 * D2 + i2.
struct ProductSpace {
  FockBasis nucleon;
  FockBasis meson;

  Index dimension() const { return nucleon.dimension() * meson.dimension(); }
  Index index(Index i1, Index i2) const { return i1 * meson.dimension() + i2; }
};

using SpacePtr = std::shared_ptr<const ProductSpace>;

SpacePtr make_space(FockBasis nucleon, FockBasis meson);

/// One tensor factor: identity, diagonal, or general sparse.
struct Factor {
  enum class Kind { identity, diagonal, sparse };
  Kind kind = Kind::identity;
  CVector diag;
  SparseMatrix sparse;

  static Factor identity() { return {}; }
  static Factor diagonal(CVector d);
  static Factor matrix(SparseMatrix m);
  SparseMatrix as_sparse(Index n) const;
  Factor adjoint() const;
};

/// Sum of terms c * L (x) R acting on the product space. A vector v is
/// viewed as the D2 x D1 matrix X(i2, i1) = v[i1 * D2 + i2], on which
/// (L (x) R) acts as R X L^T.
class TensorOperator {
 public:
  TensorOperator() = default;
  TensorOperator(Index left_dim, Index right_dim) : left_dim_(left_dim), right_dim_(right_dim) {}

  void add(Complex c, Factor left, Factor right);
  void add(const TensorOperator& other, Complex scale = 1.0);
  void add_scalar(Complex c) { add(c, Factor::identity(), Factor::identity()); }

  Index dimension() const { return left_dim_ * right_dim_; }
  Index left_dim() const { return left_dim_; }
  Index right_dim() const { return right_dim_; }
  std::size_t terms() const { return terms_.size(); }

  void apply(const CVector& x, CVector& y) const;
  CVector apply(const CVector& x) const;
  TensorOperator adjoint() const;
  /// Explicit Kronecker assembly. Intended for small spaces.
  SparseMatrix assemble() const;
  CMatrix dense() const;

 private:
  struct Term {
    Complex coeff;
    Factor left;
    Factor right;
  };
  Index left_dim_ = 0;
  Index right_dim_ = 0;
  std::vector<Term> terms_;
};

/// Pure state over a product space.
struct QuantumState {
  SpacePtr space;
  CVector amplitudes;
  double eps = 1.0;
  double deficit = 0.0;  // 1 - norm^2 lost to truncation before renormalizing
};

/// Position inside `big` of every state of `small` (same mode count).
std::vector<Index> embedding(const FockBasis& small, const FockBasis& big);

}  // namespace nelson
