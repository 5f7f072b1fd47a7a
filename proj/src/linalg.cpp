#include "nelson/linalg.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace nelson {

CMatrix dense_propagator(const CMatrix& h, double t) {
  const CMatrix g = (-kI * t) * h;
  return g.exp();
}

CMatrix materialize(const MatVec& h, Index dim) {
  CMatrix out(dim, dim);
  CVector e = CVector::Zero(dim), y(dim);
  for (Index j = 0; j < dim; ++j) {
    e[j] = 1.0;
    h(e, y);
    out.col(j) = y;
    e[j] = 0.0;
  }
  return out;
}

CVector expv(const MatVec& h, const CVector& v, double t, const ExpvOptions& options, ExpvStats* stats) {
  ExpvStats local;
  ExpvStats& st = stats ? *stats : local;
  st = ExpvStats{};
  if (t == 0.0 || v.norm() == 0.0) return v;

  const Index n = v.size();
  const int m_max = static_cast<int>(std::min<Index>(options.krylov_dim, n));
  const double sign = t > 0.0 ? 1.0 : -1.0;
  const double total = std::abs(t);

  std::vector<CVector> basis;
  basis.reserve(m_max + 1);
  CVector w = v, u(n);
  double done = 0.0;
  double tau_try = total;

  while (done < total) {
    if (st.substeps >= options.max_substeps) throw KrylovBreakdown("expv exceeded the substep limit");
    const double beta0 = w.norm();
    basis.clear();
    basis.push_back(w / beta0);
    std::vector<double> alpha, beta;
    bool happy = false;
    int m = 0;
    for (int j = 0; j < m_max; ++j) {
      h(basis[j], u);
      ++st.matvecs;
      const double a = basis[j].dot(u).real();
      alpha.push_back(a);
      u -= a * basis[j];
      if (j > 0) u -= beta[j - 1] * basis[j - 1];
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) u -= basis[i].dot(u) * basis[i];
      }
      const double b = u.norm();
      if (!std::isfinite(b)) throw KrylovBreakdown("non-finite Lanczos vector");
      m = j + 1;
      const double scale = std::abs(a) + (j > 0 ? beta[j - 1] : 0.0);
      if (b <= 1e-12 * std::max(scale, 1e-300) || m == n) {
        happy = true;
        break;
      }
      beta.push_back(b);
      basis.push_back(u / b);
    }

    RMatrix tri = RMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(tri);
    const RVector& theta = eig.eigenvalues();
    const RMatrix& q = eig.eigenvectors();

    const double remaining = total - done;
    double tau = happy ? remaining : std::min(remaining, tau_try);
    CVector c(m);
    double err = 0.0;
    for (int attempt = 0;; ++attempt) {
      CVector phase(m);
      for (int i = 0; i < m; ++i) phase[i] = std::exp(-kI * (sign * tau * theta[i])) * q(0, i);
      c = q.cast<Complex>() * phase;
      err = happy ? 0.0 : beta[m - 1] * std::abs(c[m - 1]);
      // The estimate cannot drop below round-off in the Ritz coefficients.
      if (err <= std::max(options.tolerance * tau, 64.0 * std::numeric_limits<double>::epsilon())) break;
      if (attempt > 200) throw KrylovBreakdown("expv could not meet the error tolerance");
      const double f = 0.9 * std::pow(options.tolerance * tau / err, 1.0 / m);
      tau *= std::clamp(f, 0.1, 0.5);
    }

    CVector next = CVector::Zero(n);
    for (int i = 0; i < m; ++i) next += c[i] * basis[i];
    w = beta0 * next;
    done += tau;
    ++st.substeps;
    st.error_estimate += err * beta0;
    if (err > 0.0) {
      tau_try = tau * std::clamp(0.9 * std::pow(options.tolerance * tau / err, 1.0 / m), 0.5, 2.0);
    } else {
      tau_try = 2.0 * tau;
    }
  }
  return w;
}

EigenResult lowest_eigenpairs(const MatVec& h, const CVector& start, const EigenOptions& options) {
  const Index n = start.size();
  const int nev = options.nev;
  if (nev < 1 || nev > n) throw ConfigInvalid("eigensolver nev out of range");
  const int k_max = static_cast<int>(std::min<Index>(std::max(options.max_basis, nev + 3), n));

  CMatrix v(n, k_max), w(n, k_max);
  CMatrix hp = CMatrix::Zero(k_max, k_max);
  int k = 0;
  EigenResult result;
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> normal;

  auto add_vector = [&](CVector x) {
    const double x0 = x.norm();
    if (x0 == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
      if (k > 0) x -= v.leftCols(k) * (v.leftCols(k).adjoint() * x);
    }
    const double nx = x.norm();
    if (nx <= 1e-10 * x0) return false;
    v.col(k) = x / nx;
    CVector y(n);
    h(v.col(k), y);
    ++result.matvecs;
    w.col(k) = y;
    const CVector col = v.leftCols(k + 1).adjoint() * y;
    hp.block(0, k, k + 1, 1) = col;
    hp.block(k, 0, 1, k + 1) = col.adjoint();
    ++k;
    return true;
  };
  auto random_fill = [&]() {
    CVector r(n);
    for (Index i = 0; i < n; ++i) r[i] = Complex(normal(rng), normal(rng));
    return r;
  };

  if (!add_vector(start)) add_vector(random_fill());

  while (true) {
    CMatrix small = hp.topLeftCorner(k, k);
    small = 0.5 * (small + small.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(small);
    const RVector& theta = eig.eigenvalues();
    const CMatrix& y = eig.eigenvectors();
    result.ritz_history.push_back(theta[0]);

    const int have = std::min(nev, k);
    result.values = theta.head(have);
    result.vectors = v.leftCols(k) * y.leftCols(have);
    result.residuals.resize(have);
    int worst = -1;
    CVector worst_res;
    for (int i = 0; i < have; ++i) {
      CVector r = w.leftCols(k) * y.col(i) - theta[i] * result.vectors.col(i);
      result.residuals[i] = r.norm();
      if (worst < 0 && result.residuals[i] > options.tolerance) {
        worst = i;
        worst_res = std::move(r);
      }
    }
    if (have == nev && worst < 0) {
      result.converged = true;
      break;
    }
    if (k == n) {
      // The basis spans the whole space, so the Ritz pairs are exact.
      result.converged = true;
      break;
    }
    if (result.matvecs >= options.max_matvecs) break;
    if (worst < 0) worst_res = random_fill();

    if (k == k_max) {
      const int keep = std::min(nev + 2, k - 1);
      CMatrix nv = v.leftCols(k) * y.leftCols(keep);
      CMatrix nw = w.leftCols(k) * y.leftCols(keep);
      v.leftCols(keep) = nv;
      w.leftCols(keep) = nw;
      hp.setZero();
      for (int i = 0; i < keep; ++i) hp(i, i) = theta[i];
      k = keep;
    }
    if (!add_vector(worst_res)) {
      if (!add_vector(random_fill())) break;
    }
  }
  return result;
}

EigenResult dense_lowest_eigenpairs(const CMatrix& h, int nev) {
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(sym);
  EigenResult r;
  r.values = eig.eigenvalues().head(nev);
  r.vectors = eig.eigenvectors().leftCols(nev);
  r.residuals.resize(nev);
  for (int i = 0; i < nev; ++i) r.residuals[i] = (h * r.vectors.col(i) - r.values[i] * r.vectors.col(i)).norm();
  r.converged = true;
  return r;
}

double operator_norm(const MatVec& a, const MatVec& a_adjoint, Index dim, const NormOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  CVector x(dim), y(dim), z(dim);
  for (Index i = 0; i < dim; ++i) x[i] = Complex(normal(rng), normal(rng));
  x.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    a(x, y);
    const double s2 = y.squaredNorm();
    a_adjoint(y, z);
    const double nz = z.norm();
    if (nz == 0.0) return 0.0;
    x = z / nz;
    if (it > 0 && std::abs(s2 - sigma2) <= options.tolerance * s2) {
      sigma2 = s2;
      break;
    }
    sigma2 = s2;
  }
  return std::sqrt(sigma2);
}

}  // namespace nelson
