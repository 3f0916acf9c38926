#pragma once

// Side-by-side comparison of the manual and the generated strategy over a
// list of fetch tests.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fetchsim/mission.hpp"

namespace fetchsim {

struct ObjectPlacement {
  std::string furniture;
  std::optional<Vec2> position;  // defaults to the footprint centroid
};

struct ExperimentTest {
  std::string name;
  std::string object;
  std::optional<ObjectPlacement> placement;
  std::optional<Pose2> robot;
  std::optional<std::string> start_room;  // robot at the room's center pose
  std::optional<std::string> user_room;
  std::optional<std::string> user_actual_room;
  std::optional<PerceptionNoise> noise_manual;
  std::optional<PerceptionNoise> noise_generated;
  std::uint64_t seed_manual = 0;
  std::uint64_t seed_generated = 0;
};

struct ExperimentSpec {
  std::vector<ExperimentTest> tests;
  bool concurrent_scan = false;
  bool learn = false;
};

ExperimentSpec experiment_from_json(const nlohmann::json& doc, const PerceptionNoise& base_noise);
ExperimentSpec load_experiment_file(const std::filesystem::path& path, const PerceptionNoise& base_noise);

/// The scenario with the test's object placement, robot pose and user
/// rooms applied.
Scenario apply_test(const Scenario& scenario, const ExperimentTest& test);

struct ComparisonRow {
  std::string test;
  std::string object;
  MissionReport manual;
  MissionReport generated;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  std::string to_markdown() const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

ComparisonTable run_experiment(const Scenario& scenario, const ExperimentSpec& spec);

}  // namespace fetchsim
