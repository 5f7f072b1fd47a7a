#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace lab {

using nlohmann::json;
using nelson::ConfigInvalid;

namespace {

// Reads keys of one section, tracking which were consumed so that typos
// are reported instead of silently ignored.
class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    node_ = root.at(name);
    if (!node_.is_object()) throw ConfigInvalid(name + ": expected an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_.is_object() || !node_.contains(key)) return;
    try {
      out = node_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigInvalid(path(key) + ": wrong type");
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    if (!node_.is_object() || !node_.contains(key)) return nullptr;
    return &node_.at(key);
  }

  void finish() const {
    if (!node_.is_object()) return;
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw ConfigInvalid(path(item.key()) + ": unknown key");
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  json node_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigInvalid(path + ": " + what);
}

void positive(double v, const std::string& path) { require(v > 0.0, path, "must be positive"); }

}  // namespace

Config parse_config(const json& j) {
  if (!j.is_object()) throw ConfigInvalid("config: expected a JSON object");
  static const std::set<std::string> sections{"grid", "model", "truncation", "dynamics", "sweeps", "run"};
  for (const auto& item : j.items()) {
    if (!sections.count(item.key())) throw ConfigInvalid(item.key() + ": unknown section");
  }
  Config c;

  Section g(j, "grid");
  g.get("half_length", c.grid.half_length);
  g.get("sites", c.grid.sites);
  g.get("modes", c.grid.modes);
  g.finish();
  positive(c.grid.half_length, "grid.half_length");
  require(c.grid.sites >= 4 && c.grid.sites % 2 == 0, "grid.sites", "must be even and at least 4");
  require(c.grid.modes >= 1 && c.grid.modes <= c.grid.sites, "grid.modes", "must lie in [1, grid.sites]");

  Section m(j, "model");
  m.get("nucleon_mass", c.model.nucleon_mass);
  m.get("meson_mass", c.model.meson_mass);
  m.get("charge", c.model.charge);
  if (const json* chi = m.child("chi")) {
    Section s(json{{"model.chi", *chi}}, "model.chi");
    s.get("preset", c.model.chi_preset);
    s.get("scale", c.model.chi_scale);
    s.get("width", c.model.chi_width);
    s.finish();
  }
  if (const json* v = m.child("potential")) {
    Section s(json{{"model.potential", *v}}, "model.potential");
    s.get("preset", c.model.potential_preset);
    s.get("strength", c.model.potential_strength);
    s.finish();
  }
  m.finish();
  positive(c.model.nucleon_mass, "model.nucleon_mass");
  require(c.model.meson_mass >= 0.0, "model.meson_mass", "must be nonnegative");
  positive(c.model.charge, "model.charge");
  require(c.model.chi_preset == "gaussian" || c.model.chi_preset == "sharp" || c.model.chi_preset == "zero",
          "model.chi.preset", "must be gaussian, sharp or zero");
  require(c.model.chi_scale >= 0.0, "model.chi.scale", "must be nonnegative");
  positive(c.model.chi_width, "model.chi.width");
  require(c.model.potential_preset == "harmonic" || c.model.potential_preset == "zero", "model.potential.preset",
          "must be harmonic or zero");
  require(c.model.potential_strength >= 0.0, "model.potential.strength", "must be nonnegative");

  Section t(j, "truncation");
  t.get("eps", c.truncation.eps);
  t.get("nucleon_cap", c.truncation.nucleon_cap);
  t.get("meson_cap", c.truncation.meson_cap);
  t.get("sector_n", c.truncation.sector_n);
  t.get("m_floor", c.truncation.m_floor);
  t.get("deficit_cap", c.truncation.deficit_cap);
  t.get("tail", c.truncation.tail);
  t.get("cap_margin", c.truncation.cap_margin);
  t.get("doubling_check", c.truncation.doubling_check);
  t.finish();
  positive(c.truncation.eps, "truncation.eps");
  require(c.truncation.nucleon_cap >= 1, "truncation.nucleon_cap", "must be at least 1");
  require(c.truncation.meson_cap >= 1, "truncation.meson_cap", "must be at least 1");
  require(c.truncation.sector_n >= 1, "truncation.sector_n", "must be at least 1");
  require(c.truncation.m_floor >= 1, "truncation.m_floor", "must be at least 1");
  positive(c.truncation.deficit_cap, "truncation.deficit_cap");
  require(c.truncation.tail > 0.0 && c.truncation.tail < 1.0, "truncation.tail", "must lie in (0, 1)");
  require(c.truncation.cap_margin >= 0, "truncation.cap_margin", "must be nonnegative");

  Section d(j, "dynamics");
  d.get("dt", c.dynamics.dt);
  d.get("t_final", c.dynamics.t_final);
  d.get("record_every", c.dynamics.record_every);
  d.get("free_flow", c.dynamics.free_flow);
  d.get("t_panel", c.dynamics.t_panel);
  d.get("krylov_dim", c.dynamics.krylov_dim);
  d.get("krylov_tolerance", c.dynamics.krylov_tolerance);
  d.get("duhamel_nodes", c.dynamics.duhamel_nodes);
  d.finish();
  positive(c.dynamics.dt, "dynamics.dt");
  positive(c.dynamics.t_final, "dynamics.t_final");
  require(c.dynamics.record_every >= 1, "dynamics.record_every", "must be at least 1");
  require(c.dynamics.free_flow == "exact" || c.dynamics.free_flow == "split_step", "dynamics.free_flow",
          "must be exact or split_step");
  require(!c.dynamics.t_panel.empty(), "dynamics.t_panel", "must not be empty");
  for (std::size_t i = 0; i < c.dynamics.t_panel.size(); ++i) {
    require(c.dynamics.t_panel[i] > 0.0, "dynamics.t_panel", "times must be positive");
    if (i > 0) require(c.dynamics.t_panel[i] > c.dynamics.t_panel[i - 1], "dynamics.t_panel", "must increase");
  }
  require(c.dynamics.krylov_dim >= 4, "dynamics.krylov_dim", "must be at least 4");
  positive(c.dynamics.krylov_tolerance, "dynamics.krylov_tolerance");
  require(c.dynamics.duhamel_nodes >= 5 && (c.dynamics.duhamel_nodes - 1) % 4 == 0, "dynamics.duhamel_nodes",
          "must be 4k + 1 with k >= 1");

  Section s(j, "sweeps");
  s.get("n_list", c.sweeps.n_list);
  s.get("eps_list", c.sweeps.eps_list);
  s.get("xi_count", c.sweeps.xi_count);
  s.get("xi_size", c.sweeps.xi_size);
  s.get("initial_nucleon_norm", c.sweeps.initial_nucleon_norm);
  s.get("initial_meson_norm", c.sweeps.initial_meson_norm);
  s.get("control", c.sweeps.control);
  s.get("samples", c.sweeps.samples);
  s.finish();
  require(!c.sweeps.n_list.empty(), "sweeps.n_list", "must not be empty");
  for (std::size_t i = 0; i < c.sweeps.n_list.size(); ++i) {
    require(c.sweeps.n_list[i] >= 1, "sweeps.n_list", "entries must be at least 1");
    if (i > 0) require(c.sweeps.n_list[i] > c.sweeps.n_list[i - 1], "sweeps.n_list", "must increase");
  }
  require(!c.sweeps.eps_list.empty(), "sweeps.eps_list", "must not be empty");
  for (std::size_t i = 0; i < c.sweeps.eps_list.size(); ++i) {
    positive(c.sweeps.eps_list[i], "sweeps.eps_list");
    if (i > 0) require(c.sweeps.eps_list[i] < c.sweeps.eps_list[i - 1], "sweeps.eps_list", "must decrease");
  }
  require(c.sweeps.xi_count >= 1, "sweeps.xi_count", "must be at least 1");
  positive(c.sweeps.xi_size, "sweeps.xi_size");
  require(c.sweeps.initial_nucleon_norm >= 0.0, "sweeps.initial_nucleon_norm", "must be nonnegative");
  require(c.sweeps.initial_meson_norm >= 0.0, "sweeps.initial_meson_norm", "must be nonnegative");
  require(c.sweeps.samples >= 1, "sweeps.samples", "must be at least 1");

  Section r(j, "run");
  r.get("seed", c.run.seed);
  r.get("out", c.run.out);
  r.get("parallel", c.run.parallel);
  if (const json* th = r.child("thresholds")) {
    Section x(json{{"run.thresholds", *th}}, "run.thresholds");
    Thresholds& v = c.run.thresholds;
    x.get("charge_drift", v.charge_drift);
    x.get("energy_drift", v.energy_drift);
    x.get("duhamel_residual", v.duhamel_residual);
    x.get("exact_bound", v.exact_bound);
    x.get("gronwall_ratio", v.gronwall_ratio);
    x.get("identity_residual", v.identity_residual);
    x.get("coherent_identity", v.coherent_identity);
    x.get("gradient", v.gradient);
    x.get("terminal_error", v.terminal_error);
    x.get("control_spread", v.control_spread);
    x.get("control_exact", v.control_exact);
    x.get("sandwich", v.sandwich);
    x.get("doubling_shift", v.doubling_shift);
    x.get("quantum_norm", v.quantum_norm);
    x.get("quantum_energy", v.quantum_energy);
    x.finish();
    for (double value : {v.charge_drift, v.energy_drift, v.duhamel_residual, v.exact_bound, v.gronwall_ratio,
                         v.identity_residual, v.coherent_identity, v.gradient, v.terminal_error, v.control_spread,
                         v.control_exact, v.sandwich, v.doubling_shift, v.quantum_norm, v.quantum_energy}) {
      positive(value, "run.thresholds");
    }
  }
  r.finish();
  require(!c.run.out.empty(), "run.out", "must not be empty");

  // The meson block must be admissible for the chosen dispersion.
  try {
    build_discretization(c);
  } catch (const nelson::Error& e) {
    throw ConfigInvalid(std::string("model: ") + e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const Config& c) {
  const Thresholds& v = c.run.thresholds;
  return json{
      {"grid", {{"half_length", c.grid.half_length}, {"sites", c.grid.sites}, {"modes", c.grid.modes}}},
      {"model",
       {{"nucleon_mass", c.model.nucleon_mass},
        {"meson_mass", c.model.meson_mass},
        {"charge", c.model.charge},
        {"chi", {{"preset", c.model.chi_preset}, {"scale", c.model.chi_scale}, {"width", c.model.chi_width}}},
        {"potential", {{"preset", c.model.potential_preset}, {"strength", c.model.potential_strength}}}}},
      {"truncation",
       {{"eps", c.truncation.eps},
        {"nucleon_cap", c.truncation.nucleon_cap},
        {"meson_cap", c.truncation.meson_cap},
        {"sector_n", c.truncation.sector_n},
        {"m_floor", c.truncation.m_floor},
        {"deficit_cap", c.truncation.deficit_cap},
        {"tail", c.truncation.tail},
        {"cap_margin", c.truncation.cap_margin},
        {"doubling_check", c.truncation.doubling_check}}},
      {"dynamics",
       {{"dt", c.dynamics.dt},
        {"t_final", c.dynamics.t_final},
        {"record_every", c.dynamics.record_every},
        {"free_flow", c.dynamics.free_flow},
        {"t_panel", c.dynamics.t_panel},
        {"krylov_dim", c.dynamics.krylov_dim},
        {"krylov_tolerance", c.dynamics.krylov_tolerance},
        {"duhamel_nodes", c.dynamics.duhamel_nodes}}},
      {"sweeps",
       {{"n_list", c.sweeps.n_list},
        {"eps_list", c.sweeps.eps_list},
        {"xi_count", c.sweeps.xi_count},
        {"xi_size", c.sweeps.xi_size},
        {"initial_nucleon_norm", c.sweeps.initial_nucleon_norm},
        {"initial_meson_norm", c.sweeps.initial_meson_norm},
        {"control", c.sweeps.control},
        {"samples", c.sweeps.samples}}},
      {"run",
       {{"seed", c.run.seed},
        {"out", c.run.out},
        {"parallel", c.run.parallel},
        {"thresholds",
         {{"charge_drift", v.charge_drift},
          {"energy_drift", v.energy_drift},
          {"duhamel_residual", v.duhamel_residual},
          {"exact_bound", v.exact_bound},
          {"gronwall_ratio", v.gronwall_ratio},
          {"identity_residual", v.identity_residual},
          {"coherent_identity", v.coherent_identity},
          {"gradient", v.gradient},
          {"terminal_error", v.terminal_error},
          {"control_spread", v.control_spread},
          {"control_exact", v.control_exact},
          {"sandwich", v.sandwich},
          {"doubling_shift", v.doubling_shift},
          {"quantum_norm", v.quantum_norm},
          {"quantum_energy", v.quantum_energy}}}}}};
}

nelson::Discretization build_discretization(const Config& c) {
  const nelson::Grid grid(c.grid.half_length, c.grid.sites);
  nelson::ModelParams p;
  p.nucleon_mass = c.model.nucleon_mass;
  p.meson_mass = c.model.meson_mass;
  p.charge = c.model.charge;
  if (c.model.chi_preset == "gaussian") {
    p.cutoff = nelson::gaussian_cutoff(grid, c.model.chi_width, c.model.chi_scale);
  } else if (c.model.chi_preset == "sharp") {
    p.cutoff = nelson::sharp_cutoff(grid, c.model.chi_width, c.model.chi_scale);
  } else {
    p.cutoff = nelson::RVector::Zero(grid.sites());
  }
  p.potential = c.model.potential_preset == "harmonic" ? nelson::harmonic_potential(grid, c.model.potential_strength)
                                                       : nelson::RVector::Zero(grid.sites());
  return nelson::Discretization(grid, p, nelson::centered_modes(grid, c.grid.modes));
}

}  // namespace lab
