#include "nelson/limit_harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>

namespace nelson {

Complex characteristic_function(const Discretization& disc, const QuantumState& state, const FieldState& xi) {
  return weyl(disc, state.space, xi, state.eps).expectation(state.amplitudes);
}

Complex classical_characteristic(const Discretization& disc, const FieldState& xi, const FieldState& z) {
  return std::exp(kI * (std::sqrt(2.0) * inner(disc, xi, z).real()));
}

Complex phase_averaged_characteristic(const Discretization& disc, const FieldState& xi, const FieldState& z0,
                                      double t, int nodes, const FlowOptions& flow_options) {
  const FieldState zt = t == 0.0 ? z0 : flow_to(disc, z0, 0.0, t, flow_options);
  Complex sum = 0.0;
  for (int q = 0; q < nodes; ++q) {
    const double theta = 2.0 * std::numbers::pi * q / nodes;
    const FieldState rotated{std::exp(kI * theta) * zt.z1, zt.z2};
    sum += classical_characteristic(disc, xi, rotated);
  }
  return sum / static_cast<double>(nodes);
}

std::vector<FieldState> default_xi_panel(const Discretization& disc, int count, double size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FieldState> panel;
  for (int i = 0; i < count; ++i) {
    FieldState xi = random_state(disc, rng, 1.0, 1.0);
    if (i % 3 == 0) xi.z2.setZero();
    if (i % 3 == 1) xi.z1.setZero();
    const double n = norm(disc, xi);
    panel.push_back((size / n) * xi);
  }
  return panel;
}

namespace {

EhrenfestSample field_errors(const Discretization& disc, const QuantumState& state, const FieldState& z, double t) {
  const ProductSpace& space = *state.space;
  const Index d1 = space.nucleon.dimension();
  const Index d2 = space.meson.dimension();
  const CVector& psi = state.amplitudes;
  EhrenfestSample s;
  s.t = t;
  s.eps = state.eps;
  for (int m = 0; m < disc.modes(); ++m) {
    TensorOperator a(d1, d2);
    a.add(1.0, Factor::identity(), Factor::matrix(ladder(space.meson, m, state.eps, Ladder::annihilate)));
    const Complex v = psi.dot(a.apply(psi)) / std::sqrt(disc.dk());
    s.meson_error = std::max(s.meson_error, std::abs(v - z.z2[m]));
  }
  for (int j = 0; j < disc.sites(); ++j) {
    double density = 0.0;
    for (Index i1 = 0; i1 < d1; ++i1) {
      const int occ = space.nucleon.state(i1)[j];
      if (occ != 0) density += occ * psi.segment(i1 * d2, d2).squaredNorm();
    }
    density *= state.eps / disc.dx();
    s.density_error = std::max(s.density_error, std::abs(density - std::norm(z.z1[j])));
  }
  return s;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct EpsJob {
  LimitRun run;
  std::vector<CharFnSample> samples;
  std::vector<EhrenfestSample> ehrenfest;
};

}  // namespace

std::vector<EhrenfestSample> ehrenfest_track(const Discretization& disc, const HamiltonianSet& hs,
                                             const QuantumState& initial, const FieldState& z0,
                                             const std::vector<double>& t_panel, const FlowOptions& flow_options) {
  std::vector<EhrenfestSample> out;
  QuantumState state = initial;
  double prev = 0.0;
  for (double t : t_panel) {
    state = propagate(state, hs, t - prev);
    prev = t;
    const FieldState zt = t == 0.0 ? z0 : flow_to(disc, z0, 0.0, t, flow_options);
    out.push_back(field_errors(disc, state, zt, t));
  }
  return out;
}

LimitSweepReport limit_sweep(const Discretization& disc, const FieldState& z0, const std::vector<FieldState>& xi_panel,
                              const LimitSweepOptions& options) {
  const std::vector<double>& ts = options.t_panel;
  if (ts.empty() || !std::is_sorted(ts.begin(), ts.end()) || ts.front() < 0.0) {
    throw ConfigInvalid("t panel must be nonempty, nonnegative and increasing");
  }
  for (std::size_t i = 1; i < options.eps_list.size(); ++i) {
    if (!(options.eps_list[i] < options.eps_list[i - 1])) throw ConfigInvalid("eps list must be strictly decreasing");
  }

  std::vector<FieldState> centers;
  for (double t : ts) centers.push_back(t == 0.0 ? z0 : flow_to(disc, z0, 0.0, t, options.flow));
  double meson_peak = std::pow(meson_norm(disc, z0.z2), 2);
  if (ts.back() > 0.0) {
    FlowOptions fo = options.flow;
    fo.record_every = 1;
    const Trajectory traj = flow(disc, z0, 0.0, ts.back(), fo);
    for (const FieldState& s : traj.states) meson_peak = std::max(meson_peak, std::pow(meson_norm(disc, s.z2), 2));
  }
  const double nucleon_mass = std::pow(nucleon_norm(disc, z0.z1), 2);

  auto job = [&](double eps) {
    EpsJob out;
    out.run.eps = eps;
    out.run.nucleon_cap = poisson_cap(nucleon_mass / eps, 0.1 * options.tail) + options.cap_margin;
    out.run.meson_cap = poisson_cap(meson_peak / eps, 0.1 * options.tail) + options.cap_margin;
    const SpacePtr space =
        make_space(FockBasis::truncated(BasisKind::nucleon_truncated, disc.sites(), out.run.nucleon_cap),
                   FockBasis::truncated(BasisKind::meson_truncated, disc.modes(), out.run.meson_cap));
    out.run.dimension = space->dimension();
    const HamiltonianSet hs = assemble(disc, space, eps);
    QuantumState state = coherent_state(disc, space, z0, eps, options.tail);
    out.run.deficit = state.deficit;
    double prev = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (ts[k] > prev) state = propagate(state, hs, ts[k] - prev, options.propagation);
      prev = ts[k];
      out.run.norm_drift = std::max(out.run.norm_drift, std::abs(state.amplitudes.norm() - 1.0));
      for (std::size_t x = 0; x < xi_panel.size(); ++x) {
        CharFnSample s;
        s.t = ts[k];
        s.xi_index = static_cast<int>(x);
        s.eps = eps;
        s.quantum_value = characteristic_function(disc, state, xi_panel[x]);
        s.classical_value = classical_characteristic(disc, xi_panel[x], centers[k]);
        s.error = std::abs(s.quantum_value - s.classical_value);
        out.samples.push_back(s);
      }
      out.ehrenfest.push_back(field_errors(disc, state, centers[k], ts[k]));
    }
    return out;
  };

  std::vector<EpsJob> jobs;
  if (options.parallel) {
    std::vector<std::future<EpsJob>> futures;
    for (double eps : options.eps_list) futures.push_back(std::async(std::launch::async, job, eps));
    for (auto& f : futures) jobs.push_back(f.get());
  } else {
    for (double eps : options.eps_list) jobs.push_back(job(eps));
  }

  LimitSweepReport rep;
  for (EpsJob& j : jobs) {
    rep.runs.push_back(j.run);
    rep.samples.insert(rep.samples.end(), j.samples.begin(), j.samples.end());
    rep.ehrenfest.insert(rep.ehrenfest.end(), j.ehrenfest.begin(), j.ehrenfest.end());
  }

  // samples are ordered eps-major, then t, then xi.
  const std::size_t nt = ts.size();
  const std::size_t nx = xi_panel.size();
  const std::size_t ne = options.eps_list.size();
  auto error_at = [&](std::size_t e, std::size_t k, std::size_t x) { return rep.samples[(e * nt + k) * nx + x].error; };
  rep.monotone = true;
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t x = 0; x < nx; ++x) {
      std::vector<double> errs;
      for (std::size_t e = 0; e < ne; ++e) {
        errs.push_back(error_at(e, k, x));
        if (e > 0 && !(errs[e] < errs[e - 1])) rep.monotone = false;
      }
      rep.slopes.push_back(loglog_slope(options.eps_list, errs));
      if (ne > 0) rep.terminal_error = std::max(rep.terminal_error, errs.back());
    }
  }
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t x = 0; x < nx; ++x) {
      double lo = error_at(e, 0, x), hi = lo;
      for (std::size_t k = 1; k < nt; ++k) {
        lo = std::min(lo, error_at(e, k, x));
        hi = std::max(hi, error_at(e, k, x));
      }
      rep.t_spread = std::max(rep.t_spread, hi - lo);
    }
  }
  return rep;
}

}  // namespace nelson
