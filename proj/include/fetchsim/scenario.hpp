#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "fetchsim/nav.hpp"
#include "fetchsim/percept.hpp"
#include "fetchsim/strategy.hpp"
#include "fetchsim/tablegeom.hpp"
#include "fetchsim/world.hpp"

namespace fetchsim {

/// Everything a scenario document carries: the world plus the manual
/// annotations and the model parameters.
struct Scenario {
  WorldModel world;
  std::vector<Annotation> annotations;
  DurationModel durations;
  PerceptionNoise noise;
  CostParams cost;
  HeuristicParams heuristics;
};

/// Throws SchemaError, InvariantViolation or InvalidAnnotation.
Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const Scenario& scenario);

PerceptionNoise noise_from_json(const nlohmann::json& doc, const PerceptionNoise& base, const std::string& path);
nlohmann::json noise_to_json(const PerceptionNoise& noise);

}  // namespace fetchsim
