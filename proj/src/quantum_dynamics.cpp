#include "nelson/quantum_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nelson/classical_dynamics.hpp"

namespace nelson {

namespace {

void check_space(const Discretization& disc, const ProductSpace& space) {
  if (space.nucleon.modes() != disc.sites()) throw ConfigInvalid("nucleon basis must have one mode per site");
  if (space.meson.modes() != disc.modes()) throw ConfigInvalid("meson basis must have one mode per selected mode");
}

// Per nucleon state: n_j for one site, as a complex diagonal.
CVector occupation_diagonal(const FockBasis& basis, int site) {
  CVector d(basis.dimension());
  for (Index s = 0; s < basis.dimension(); ++s) d[s] = static_cast<double>(basis.state(s)[site]);
  return d;
}

// sum_j w_j (conj(xi_j) psi_j - xi_j psi_j^+) with psi_j = sqrt(eps) c_j.
SparseMatrix xi_field(const FockBasis& basis, const CVector& w, const CVector& xi, double eps) {
  SparseMatrix out(basis.dimension(), basis.dimension());
  for (Index j = 0; j < xi.size(); ++j) {
    if (xi[j] == Complex(0.0) || w[j] == Complex(0.0)) continue;
    const SparseMatrix c = ladder(basis, static_cast<int>(j), eps, Ladder::annihilate);
    const SparseMatrix cd = ladder(basis, static_cast<int>(j), eps, Ladder::create);
    out += (w[j] * std::conj(xi[j])) * c - (w[j] * xi[j]) * cd;
  }
  return out;
}

// c_j = sum_m sqrt(dk) (conj(g_mj) xi2_m - g_mj conj(xi2_m)).
CVector shift_coefficients(const Discretization& disc, const CVector& xi2) {
  const CMatrix& g = disc.form_factor();
  const double sdk = std::sqrt(disc.dk());
  CVector c = CVector::Zero(disc.sites());
  for (int j = 0; j < disc.sites(); ++j) {
    for (int m = 0; m < disc.modes(); ++m) {
      c[j] += sdk * (std::conj(g(m, j)) * xi2[m] - g(m, j) * std::conj(xi2[m]));
    }
  }
  return c;
}

// Composite Simpson over every stride-th node.
Complex simpson(const std::vector<Complex>& f, double h, int stride) {
  const std::size_t n = (f.size() - 1) / stride;
  Complex s = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i * stride];
  return s * (h * stride / 3.0);
}

}  // namespace

CVector coupling_diagonal(const Discretization& disc, const FockBasis& nucleon, int mode) {
  const CMatrix& g = disc.form_factor();
  CVector d(nucleon.dimension());
  for (Index s = 0; s < nucleon.dimension(); ++s) {
    const Occupation& occ = nucleon.state(s);
    Complex v = 0.0;
    for (int j = 0; j < disc.sites(); ++j) v += static_cast<double>(occ[j]) * g(mode, j);
    d[s] = v;
  }
  return d;
}

RVector number_weight(const ProductSpace& space, double eps) {
  const RVector n1 = number_diagonal(space.nucleon, eps);
  const RVector n2 = number_diagonal(space.meson, eps);
  RVector t(space.dimension());
  for (Index i1 = 0; i1 < n1.size(); ++i1) {
    for (Index i2 = 0; i2 < n2.size(); ++i2) t[space.index(i1, i2)] = n1[i1] * n1[i1] + n2[i2] + eps;
  }
  return t;
}

MatVec as_matvec(const TensorOperator& op) {
  return [&op](const CVector& x, CVector& y) { op.apply(x, y); };
}

HamiltonianSet assemble(const Discretization& disc, const SpacePtr& space, double eps) {
  if (!(eps > 0.0)) throw ConfigInvalid("eps must be positive");
  check_space(disc, *space);
  const Index d1 = space->nucleon.dimension();
  const Index d2 = space->meson.dimension();

  const SparseMatrix kinetic = second_quantize(space->nucleon, disc.one_body(), 1.0);
  const RVector meson_energy = second_quantize_diagonal(space->meson, disc.omega(), 1.0);

  HamiltonianSet hs;
  hs.space = space;
  hs.eps = eps;
  TensorOperator free_part(d1, d2);
  free_part.add(1.0, Factor::matrix(kinetic), Factor::identity());
  free_part.add(1.0, Factor::identity(), Factor::diagonal(meson_energy.cast<Complex>()));

  TensorOperator coupling(d1, d2);
  for (int m = 0; m < disc.modes(); ++m) {
    if (disc.chi()[m] == 0.0) continue;
    const CVector c = coupling_diagonal(disc, space->nucleon, m);
    coupling.add(1.0, Factor::diagonal(c), Factor::matrix(ladder(space->meson, m, 1.0, Ladder::create)));
    coupling.add(1.0, Factor::diagonal(c.conjugate()),
                 Factor::matrix(ladder(space->meson, m, 1.0, Ladder::annihilate)));
  }

  const double e32 = eps * std::sqrt(eps);
  hs.h0 = TensorOperator(d1, d2);
  hs.h0.add(free_part, eps);
  hs.hi = TensorOperator(d1, d2);
  hs.hi.add(coupling, e32);
  hs.h = TensorOperator(d1, d2);
  hs.h.add(hs.h0);
  hs.h.add(hs.hi);
  hs.h0_generator = free_part;
  hs.generator = TensorOperator(d1, d2);
  hs.generator.add(free_part);
  hs.generator.add(coupling, std::sqrt(eps));
  return hs;
}

namespace {

CVector evolve(const TensorOperator& gen, const CVector& v, double t, const PropagateOptions& options) {
  const Index dim = v.size();
  if (options.force_dense) return dense_propagator(gen.dense(), t) * v;
  try {
    return expv(as_matvec(gen), v, t, options.krylov);
  } catch (const KrylovBreakdown&) {
    if (dim > options.dense_limit) throw;
    return dense_propagator(gen.dense(), t) * v;
  }
}

}  // namespace

QuantumState propagate(const QuantumState& state, const HamiltonianSet& hs, double t, const PropagateOptions& options) {
  QuantumState out = state;
  out.amplitudes = evolve(hs.generator, state.amplitudes, t, options);
  return out;
}

QuantumState interaction_picture(const QuantumState& state_t, const HamiltonianSet& hs, double t,
                                 const PropagateOptions& options) {
  QuantumState out = state_t;
  out.amplitudes = evolve(hs.h0_generator, state_t.amplitudes, -t, options);
  return out;
}

BOperators b_operators(const Discretization& disc, const SpacePtr& space, const FieldState& xi, double eps) {
  check_space(disc, *space);
  const FockBasis& nuc = space->nucleon;
  const FockBasis& mes = space->meson;
  const Index d1 = nuc.dimension();
  const Index d2 = mes.dimension();
  const bool has_xi1 = !xi.z1.isZero(0.0);
  if (has_xi1 && nuc.is_sector()) {
    throw SectorBasisUnsupported("B operators with xi1 != 0 need a truncated nucleon basis");
  }

  const CMatrix& g = disc.form_factor();
  const double dx = disc.dx();
  const double sdx = std::sqrt(dx);
  const double r2 = std::sqrt(2.0);
  const CVector c = shift_coefficients(disc, xi.z2);

  BOperators b{TensorOperator(d1, d2), TensorOperator(d1, d2), 0.0};

  CVector density = CVector::Zero(d1);
  for (int j = 0; j < disc.sites(); ++j) density += c[j] * occupation_diagonal(nuc, j);
  b.b0.add(-eps / r2, Factor::diagonal(density), Factor::identity());

  if (!has_xi1) return b;

  for (int m = 0; m < disc.modes(); ++m) {
    if (disc.chi()[m] == 0.0) continue;
    const CVector gm = g.row(m).transpose();
    const SparseMatrix up = xi_field(nuc, gm, xi.z1, eps);
    const SparseMatrix down = xi_field(nuc, gm.conjugate(), xi.z1, eps);
    b.b0.add(sdx / r2, Factor::matrix(up), Factor::matrix(ladder(mes, m, eps, Ladder::create)));
    b.b0.add(sdx / r2, Factor::matrix(down), Factor::matrix(ladder(mes, m, eps, Ladder::annihilate)));
  }

  b.b1.add(0.5 * kI * sdx, Factor::matrix(xi_field(nuc, c, xi.z1, eps)), Factor::identity());
  SparseMatrix meson_field(d2, d2);
  for (int m = 0; m < disc.modes(); ++m) {
    Complex gm = 0.0;
    for (int j = 0; j < disc.sites(); ++j) gm += dx * std::norm(xi.z1[j]) * g(m, j);
    if (gm == Complex(0.0)) continue;
    meson_field += gm * ladder(mes, m, eps, Ladder::create) + std::conj(gm) * ladder(mes, m, eps, Ladder::annihilate);
  }
  b.b1.add(0.5 * kI, Factor::identity(), Factor::matrix(meson_field));

  Complex b2 = 0.0;
  for (int j = 0; j < disc.sites(); ++j) b2 += dx * std::norm(xi.z1[j]) * c[j];
  b.b2 = -b2 / (2.0 * r2);
  return b;
}

TensorOperator shifted_interaction(const Discretization& disc, const SpacePtr& space, const FieldState& xi,
                                   double eps) {
  check_space(disc, *space);
  const FockBasis& nuc = space->nucleon;
  const FockBasis& mes = space->meson;
  const bool has_xi1 = !xi.z1.isZero(0.0);
  if (has_xi1 && nuc.is_sector()) throw SectorBasisUnsupported("shifted nucleon field needs a truncated basis");
  const CMatrix& g = disc.form_factor();
  const Complex pre = kI * eps / std::sqrt(2.0);

  CVector t(disc.modes());
  for (int m = 0; m < disc.modes(); ++m) t[m] = pre * std::sqrt(disc.dk()) * xi.z2[m];

  std::vector<SparseMatrix> create, annihilate;
  for (int m = 0; m < disc.modes(); ++m) {
    create.push_back(ladder(mes, m, eps, Ladder::create));
    annihilate.push_back(ladder(mes, m, eps, Ladder::annihilate));
  }

  TensorOperator out(nuc.dimension(), mes.dimension());
  for (int j = 0; j < disc.sites(); ++j) {
    SparseMatrix field(mes.dimension(), mes.dimension());
    Complex shift = 0.0;
    for (int m = 0; m < disc.modes(); ++m) {
      if (disc.chi()[m] == 0.0) continue;
      field += g(m, j) * create[m] + std::conj(g(m, j)) * annihilate[m];
      shift += g(m, j) * std::conj(t[m]) + std::conj(g(m, j)) * t[m];
    }
    Factor density;
    const CVector nj = eps * occupation_diagonal(nuc, j);
    if (has_xi1 && xi.z1[j] != Complex(0.0)) {
      const Complex s = pre * std::sqrt(disc.dx()) * xi.z1[j];
      const SparseMatrix c = ladder(nuc, j, eps, Ladder::annihilate);
      const SparseMatrix cd = ladder(nuc, j, eps, Ladder::create);
      SparseMatrix q = SparseMatrix(cd + std::conj(s) * identity_matrix(nuc.dimension())) *
                       SparseMatrix(c + s * identity_matrix(nuc.dimension()));
      density = Factor::matrix(q);
    } else {
      density = Factor::diagonal(nj);
    }
    out.add(1.0, density, Factor::matrix(field));
    out.add(shift, density, Factor::identity());
  }
  return out;
}

namespace {

// A basis with `margin` more quanta than `b`, or `b` itself for sectors.
FockBasis widened(const FockBasis& b, int margin) {
  if (b.is_sector() || margin == 0) return b;
  return FockBasis::truncated(b.kind(), b.modes(), b.cap() + margin);
}

}  // namespace

DuhamelReport duhamel_check(const Discretization& disc, const HamiltonianSet& hs, const QuantumState& initial,
                            const FieldState& xi, double t, int nodes, int margin) {
  if (nodes < 5 || (nodes - 1) % 4 != 0) throw ConfigInvalid("Duhamel quadrature needs 4k+1 nodes");
  const double eps = hs.eps;
  const double h = t / (nodes - 1);
  PropagateOptions popts;

  DuhamelReport rep;
  rep.t = t;
  rep.xi = xi;
  rep.quadrature_nodes = nodes;

  const QuantumState evolved = propagate(initial, hs, t, popts);
  const QuantumState tilde = interaction_picture(evolved, hs, t, popts);
  rep.lhs = weyl(disc, hs.space, xi, eps).expectation(tilde.amplitudes);

  // The B_j side is evaluated on a wider basis so that the creation parts
  // of W and B_j act on the state exactly rather than being clipped at the caps.
  const ProductSpace& core = *hs.space;
  const SpacePtr wide = make_space(widened(core.nucleon, margin), widened(core.meson, margin));
  const std::vector<Index> e1 = embedding(core.nucleon, wide->nucleon);
  const std::vector<Index> e2 = embedding(core.meson, wide->meson);
  auto lift = [&](const CVector& v) {
    CVector out = CVector::Zero(wide->dimension());
    for (Index i1 = 0; i1 < core.nucleon.dimension(); ++i1) {
      for (Index i2 = 0; i2 < core.meson.dimension(); ++i2) out[wide->index(e1[i1], e2[i2])] = v[core.index(i1, i2)];
    }
    return out;
  };
  const Complex start = weyl(disc, wide, xi, eps).expectation(lift(initial.amplitudes));

  std::vector<Complex> f0(nodes), f12(nodes);
  CVector psi = initial.amplitudes;
  for (int k = 0; k < nodes; ++k) {
    const FieldState xs = free_flow(disc, xi, k * h);
    const WeylOperator w = weyl(disc, wide, xs, eps);
    const BOperators b = b_operators(disc, wide, xs, eps);
    const CVector p = lift(psi);
    f0[k] = p.dot(w.apply(b.b0.apply(p)));
    f12[k] = eps * p.dot(w.apply(b.b1.apply(p))) + eps * eps * b.b2 * p.dot(w.apply(p));
    if (k + 1 < nodes) psi = expv(as_matvec(hs.generator), psi, h, popts.krylov);
  }

  const Complex i0 = simpson(f0, h, 1);
  const Complex i12 = simpson(f12, h, 1);
  const Complex c0 = simpson(f0, h, 2);
  const Complex c12 = simpson(f12, h, 2);
  rep.start = start;
  rep.leading = i0;
  rep.correction = i12;
  rep.rhs = start + i0 + i12;
  rep.quadrature_error = std::abs((i0 + i12) - (c0 + c12)) / 15.0;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  return rep;
}

double gronwall_constant(double delta, double eps) { return std::max(2.0 + eps, 1.0 + std::pow(1.0 + eps, delta)); }

GronwallReport gronwall_bound_check(const Discretization& disc, const HamiltonianSet& hs, double delta, double t,
                                    int samples, std::uint64_t seed) {
  const double eps = hs.eps;
  const Index dim = hs.space->dimension();
  const RVector weight = number_weight(*hs.space, eps);
  const CVector up = weight.array().pow(delta).cast<Complex>();
  const CVector down = weight.array().pow(-delta).cast<Complex>();

  const bool dense = dim <= 2000;
  CMatrix u;
  if (dense) u = dense_propagator(hs.generator.dense(), t);
  const MatVec gen = as_matvec(hs.generator);
  auto evolve_by = [&](const CVector& x, double s) -> CVector {
    if (dense) return s > 0 ? CVector(u * x) : CVector(u.adjoint() * x);
    return expv(gen, x, s);
  };
  const MatVec a = [&](const CVector& x, CVector& y) { y = up.cwiseProduct(evolve_by(down.cwiseProduct(x), t)); };
  const MatVec a_adj = [&](const CVector& x, CVector& y) {
    y = down.cwiseProduct(evolve_by(up.cwiseProduct(x), -t));
  };

  GronwallReport rep;
  rep.delta = delta;
  rep.t = t;
  rep.bound = std::exp(gronwall_constant(delta, eps) * std::sqrt(eps) * std::abs(delta) * std::abs(t) *
                       disc.chi_over_sqrt_omega_norm());
  NormOptions nopts;
  nopts.seed = seed;
  rep.lhs_norm = operator_norm(a, a_adj, dim, nopts);
  rep.ratio = rep.lhs_norm / rep.bound;

  std::mt19937_64 rng(seed);
  CVector y;
  for (int i = 0; i < samples; ++i) {
    const CVector x = random_vector(dim, rng);
    a(x, y);
    rep.sampled_ratio = std::max(rep.sampled_ratio, y.norm() / (x.norm() * rep.bound));
  }
  return rep;
}

}  // namespace nelson
