#pragma once

// The fetch-and-carry task as a hierarchical state machine: locate the
// object (with either agenda), grasp it and put it on the tray, then find
// the user and report.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fetchsim/hsm.hpp"
#include "fetchsim/scenario.hpp"

namespace fetchsim {

enum class RoomOrder { NearestFirst, Fixed };

struct MissionConfig {
  std::string target_object;
  StrategyKind strategy = StrategyKind::Manual;
  RoomOrder room_order = RoomOrder::NearestFirst;
  std::vector<std::string> fixed_room_order;  // RoomOrder::Fixed only
  double grasp_success_probability = 1.0;
  bool concurrent_scan = false;
  std::uint64_t seed = 0;
  /// Replaces the scenario's perception noise for this run.
  std::optional<PerceptionNoise> noise;
  bool learn = true;

  void validate() const;
};

/// Y: the object was recognized. N*: only a spurious detection of it was
/// made. N: nothing was recognized.
enum class DetectionStatus { Found, NotFound, FalsePositive };
std::string to_string(DetectionStatus s);

struct TimeBreakdown {
  double navigation = 0.0;
  double scanning = 0.0;
  double recognition = 0.0;
  double manipulation = 0.0;
  double user_interaction = 0.0;

  double total() const { return navigation + scanning + recognition + manipulation + user_interaction; }
};

struct MissionReport {
  std::string target;
  StrategyKind strategy = StrategyKind::Manual;
  std::uint64_t seed = 0;
  std::string outcome;
  DetectionStatus object_detected = DetectionStatus::NotFound;
  std::optional<Detection> detection;
  bool grasped = false;
  bool on_tray = false;
  bool user_informed = false;
  std::string message;
  double duration = 0.0;
  int positions_visited = 0;
  int positions_total = 0;
  std::vector<std::string> visited_locations;
  std::vector<std::string> rooms_searched;
  std::vector<std::string> user_search_rooms;
  TimeBreakdown time;
  ProbabilityTable table;
  hsm::Trace trace;
};

nlohmann::json report_to_json(const MissionReport& report);

struct MissionState;

/// A validated machine bound to its mission state. The scenario must
/// outlive it; run it once with `initial` as userdata.
struct MissionMachine {
  hsm::MachinePtr machine;
  hsm::Userdata initial;
  std::shared_ptr<MissionState> state;
};

/// Throws InvariantViolation when the target object is unknown or the
/// assembled machine fails validation.
MissionMachine build_mission(const MissionConfig& config, const Scenario& scenario,
                             const ProbabilityTable& table);

/// Runs to completion. `table` is the prior; the report carries the
/// updated one.
MissionReport run_mission(const MissionConfig& config, const Scenario& scenario, const ProbabilityTable& table);

/// Prior over the manual annotation ids.
ProbabilityTable annotation_table(const Scenario& scenario, double alpha = 1.0);

struct UserSearch {
  bool found = false;
  std::vector<std::string> rooms;
  Pose2 final_pose;
  double navigation_seconds = 0.0;
  double detection_seconds = 0.0;
};

/// Visits the user's last-seen room first, then the nearest unvisited room
/// until the user is detected or every reachable room was tried.
UserSearch find_user(const WorldModel& world, const Pose2& robot, const PerceptionNoise& noise, Rng& rng,
                     const DurationModel& durations);

struct InformOutcome {
  UserSearch search;
  bool informed = false;
  std::string message;
  double seconds = 0.0;
};

std::string inform_message(const WorldModel& world, const std::string& object,
                           const std::optional<Detection>& detection);

InformOutcome inform_user(const WorldModel& world, const Pose2& robot, const std::optional<Detection>& detection,
                          const std::string& object, const PerceptionNoise& noise, Rng& rng,
                          const DurationModel& durations);

/// "on the table in the dining room", "in the kitchen", or a fallback
/// phrase. Never contains coordinates.
std::string describe_location(const WorldModel& world, const Pose6& pose);

/// m:ss, seconds rounded to the nearest integer.
std::string format_mmss(double seconds);

}  // namespace fetchsim
