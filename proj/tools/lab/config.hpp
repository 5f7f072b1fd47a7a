#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nelson/discretization.hpp"

namespace lab {

struct GridConfig {
  double half_length = 4.0;
  int sites = 8;
  int modes = 4;
};

struct ModelConfig {
  double nucleon_mass = 1.0;
  double meson_mass = 1.0;
  double charge = 1.0;
  std::string chi_preset = "gaussian";  // gaussian | sharp | zero
  double chi_scale = 0.175;
  double chi_width = 1.5;               // Gaussian width or sharp cutoff kappa
  std::string potential_preset = "harmonic";  // harmonic | zero
  double potential_strength = 0.25;
};

struct TruncationConfig {
  double eps = 0.2;
  int nucleon_cap = 2;   // n_max on truncated nucleon spaces
  int meson_cap = 6;     // m_max on truncated meson spaces
  int sector_n = 2;      // n for sector checks
  int m_floor = 2;       // lower bound for the ground state meson cap
  double deficit_cap = 1e-6;
  double tail = 1e-4;    // Poisson tail per cap in the limit sweep
  int cap_margin = 2;
  bool doubling_check = true;
};

struct DynamicsConfig {
  double dt = 1e-3;
  double t_final = 5.0;
  int record_every = 100;
  std::string free_flow = "exact";  // exact | split_step
  std::vector<double> t_panel{0.25, 0.5};
  int krylov_dim = 30;
  double krylov_tolerance = 1e-12;
  int duhamel_nodes = 65;
};

struct SweepConfig {
  std::vector<int> n_list{1, 2, 3, 4, 5};
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  int xi_count = 6;
  double xi_size = 1.0;
  double initial_nucleon_norm = 0.316;
  double initial_meson_norm = 0.316;
  bool control = true;  // also run the decoupled control
  int samples = 500;    // random vectors per inequality
};

struct Thresholds {
  double charge_drift = 1e-8;
  double energy_drift = 1e-6;
  double duhamel_residual = 1e-6;
  double exact_bound = 1e-9;      // slack on exact inequalities
  double gronwall_ratio = 1.01;
  double identity_residual = 1e-8;
  double coherent_identity = 1e-5;
  double gradient = 1e-6;
  double terminal_error = 0.1;
  double control_spread = 1e-6;
  double control_exact = 1e-9;
  double sandwich = 1e-6;
  double doubling_shift = 1e-4;
  double quantum_norm = 1e-10;
  double quantum_energy = 1e-9;
};

struct RunConfig {
  std::uint64_t seed = 7;
  std::string out = "out";
  bool parallel = true;
  Thresholds thresholds;
};

struct Config {
  GridConfig grid;
  ModelConfig model;
  TruncationConfig truncation;
  DynamicsConfig dynamics;
  SweepConfig sweeps;
  RunConfig run;
};

/// Parses and validates. Unknown keys and out-of-range values throw
/// nelson::ConfigInvalid with the offending path, e.g. "grid.sites".
Config parse_config(const nlohmann::json& j);

/// Reads the file and parses it. A missing or unreadable file throws
/// ConfigInvalid naming the path.
Config load_config(const std::string& path);

/// Fully expanded config, including defaults, in a canonical key order.
nlohmann::json to_json(const Config& c);

nelson::Discretization build_discretization(const Config& c);

}  // namespace lab
