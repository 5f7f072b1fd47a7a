#include "nelson/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

namespace nelson {

LowestPair lowest_eigenpair(const HamiltonianSet& hs, const CVector& start, Index dense_limit,
                            const EigenOptions& options) {
  const Index dim = hs.space->dimension();
  LowestPair out;
  EigenResult r;
  if (dim <= dense_limit) {
    r = dense_lowest_eigenpairs(hs.h.dense(), std::min<int>(2, static_cast<int>(dim)));
    out.dense = true;
  } else {
    EigenOptions opts = options;
    opts.nev = 2;
    // A seeded random component keeps the start from lying in a symmetry sector.
    std::mt19937_64 rng(options.seed);
    CVector v0 = random_vector(dim, rng);
    if (start.size() == dim) v0 = start / start.norm() + 1e-2 * v0 / v0.norm();
    r = lowest_eigenpairs(as_matvec(hs.h), v0, opts);
    if (!r.converged) throw ConvergenceFailure("Lanczos did not reach the residual tolerance");
  }
  out.e0 = r.values[0];
  out.e1 = r.values.size() > 1 ? r.values[1] : r.values[0];
  out.psi0.space = hs.space;
  out.psi0.eps = hs.eps;
  out.psi0.amplitudes = r.vectors.col(0);
  out.residual = (hs.h.apply(out.psi0.amplitudes) - out.e0 * out.psi0.amplitudes).norm();
  out.matvecs = r.matvecs;
  out.ritz_history = r.ritz_history;
  return out;
}

CoherentEnergy coherent_upper_bound(const Discretization& disc, const HamiltonianSet& hs, const FieldState& z,
                                    double deficit_cap) {
  const QuantumState c = coherent_state(disc, hs.space, z, hs.eps, deficit_cap);
  return {c.amplitudes.dot(hs.h.apply(c.amplitudes)).real(), c.deficit};
}

namespace {

int meson_cap_for(const Discretization& disc, const FieldState& z, double eps, int floor_cap, double deficit_cap) {
  const double mean = std::pow(meson_norm(disc, z.z2), 2) / eps;
  return std::max(floor_cap, poisson_cap(mean, 0.1 * deficit_cap));
}

GroundStateRecord sector_record(const Discretization& disc, const FieldState& zstar, double e_classical, int n,
                                const GroundSweepOptions& options) {
  GroundStateRecord rec;
  rec.n = n;
  rec.eps = disc.charge() * disc.charge() / n;
  rec.e_classical = e_classical;
  rec.m_max = meson_cap_for(disc, zstar, rec.eps, options.m_max, options.deficit_cap);

  const FockBasis nuc = FockBasis::sector(disc.sites(), n);
  const SpacePtr space = make_space(nuc, FockBasis::truncated(BasisKind::meson_truncated, disc.modes(), rec.m_max));
  const HamiltonianSet hs = assemble(disc, space, rec.eps);
  const CoherentEnergy coh = coherent_upper_bound(disc, hs, zstar, options.deficit_cap);
  rec.e_coherent = coh.value;
  rec.coherent_deficit = coh.deficit;

  const CVector start = coherent_state(disc, space, zstar, rec.eps, options.deficit_cap).amplitudes;
  const LowestPair lp = lowest_eigenpair(hs, start);
  rec.e_quantum = lp.e0;
  rec.gap = lp.e1 - lp.e0;
  rec.residual = lp.residual;
  rec.dimension = space->dimension();

  if (options.doubling_check) {
    rec.m_check = 2 * rec.m_max;
    const SpacePtr big =
        make_space(nuc, FockBasis::truncated(BasisKind::meson_truncated, disc.modes(), rec.m_check));
    const HamiltonianSet hb = assemble(disc, big, rec.eps);
    const CVector sb = coherent_state(disc, big, zstar, rec.eps, options.deficit_cap).amplitudes;
    // Eigenvalue error is quadratic in the residual, so a looser residual suffices here.
    EigenOptions loose;
    loose.tolerance = 1e-6;
    rec.doubling_shift = std::abs(lowest_eigenpair(hb, sb, 400, loose).e0 - rec.e_quantum);
  }
  return rec;
}

}  // namespace

GroundSweepReport ground_energy_sweep(const Discretization& disc, const GroundSweepOptions& options) {
  GroundSweepReport rep;
  rep.classical = minimize_constrained(disc, options.minimization);

  std::vector<std::future<GroundStateRecord>> jobs;
  const auto policy = options.parallel ? std::launch::async : std::launch::deferred;
  for (int n : options.n_list) {
    jobs.push_back(std::async(policy, [&, n] {
      return sector_record(disc, rep.classical.minimizer, rep.classical.value, n, options);
    }));
  }
  for (auto& job : jobs) {
    rep.records.push_back(job.get());
    rep.max_doubling_shift = std::max(rep.max_doubling_shift, rep.records.back().doubling_shift);
  }

  rep.sandwich = true;
  rep.gaps_nonincreasing = true;
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const GroundStateRecord& r = rep.records[i];
    if (r.e_quantum > r.e_coherent + 1e-6) rep.sandwich = false;
    if (i > 0 && rep.records[i - 1].n >= 2) {
      const double prev = std::abs(rep.records[i - 1].e_quantum - r.e_classical);
      const double cur = std::abs(r.e_quantum - r.e_classical);
      if (cur > prev) rep.gaps_nonincreasing = false;
    }
  }
  return rep;
}

}  // namespace nelson
