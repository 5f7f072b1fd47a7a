#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "output.hpp"

namespace lab {

/// One thresholded quantity. `value <= limit` passes unless `pass` was set
/// explicitly for a boolean property.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct ScenarioResult {
  nlohmann::json summary;
  std::vector<Table> tables;
  std::vector<Check> checks;

  bool passed() const;
};

const std::vector<std::string>& scenario_names();

/// Runs a registered scenario. Unknown names throw nelson::ConfigInvalid.
ScenarioResult run_scenario(const std::string& name, const Config& config);

}  // namespace lab
