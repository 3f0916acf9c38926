#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fetchsim/nav.hpp"
#include "fetchsim/percept.hpp"
#include "fetchsim/tablegeom.hpp"

namespace fetchsim {

/// How the sighting probability enters the cost: `Linear` subtracts k1*P,
/// `NegLog` adds k1*(-ln P).
enum class ProbabilityTransform { Linear, NegLog };

struct CostParams {
  double k1 = 1.0;
  double k2 = 1.0;
  double k_pen = 1.0;
  /// Path lengths are divided by this; defaults to the map diagonal.
  std::optional<double> bat_normalizer;
  ProbabilityTransform transform = ProbabilityTransform::Linear;

  void validate() const;
  double normalizer(const WorldModel& world) const { return bat_normalizer.value_or(world.diagonal()); }
};

/// Laplace-smoothed sighting counts per (object, location id). For each
/// object the probabilities over the registered locations sum to one.
class ProbabilityTable {
 public:
  explicit ProbabilityTable(std::vector<std::string> locations = {}, double alpha = 1.0);

  double alpha() const noexcept { return alpha_; }
  const std::vector<std::string>& locations() const noexcept { return locations_; }
  bool knows(const std::string& location) const;
  int count(const std::string& object, const std::string& location) const;
  /// nullopt for an unregistered location.
  std::optional<double> probability(const std::string& object, const std::string& location) const;
  void record(const std::string& object, const std::string& location, int times = 1);

  nlohmann::json to_json() const;
  static ProbabilityTable from_json(const nlohmann::json& doc);

  friend bool operator==(const ProbabilityTable&, const ProbabilityTable&) = default;

 private:
  std::vector<std::string> locations_;
  double alpha_;
  std::map<std::string, std::map<std::string, int>> counts_;
};

enum class StrategyKind { Manual, Generated };
std::string to_string(StrategyKind s);
std::optional<StrategyKind> strategy_from_string(const std::string& s);

struct SearchAgenda {
  std::vector<SearchLocation> remaining;
  std::vector<SearchLocation> visited;
  StrategyKind strategy = StrategyKind::Manual;

  std::size_t size() const { return remaining.size() + visited.size(); }
};

/// Path length in metres from the robot to a location, nullopt if unreachable.
using PathLengthFn = std::function<std::optional<double>(const SearchLocation&)>;

/// Search cost of one location: path/normalizer - k1*P + k2*c_pen, with
/// c_pen = k_pen inside the user's room. `fallback_probability` stands in
/// for P when the table does not know the location.
std::optional<double> cost(const std::string& object, const SearchLocation& location,
                           std::optional<double> path_length, const std::string& user_room,
                           const ProbabilityTable& table, const CostParams& params, double normalizer,
                           double fallback_probability);

std::optional<double> cost(const std::string& object, const SearchLocation& location, const Pose2& robot,
                           const std::string& user_room, const ProbabilityTable& table, const CostParams& params,
                           const WorldModel& world);

/// Picks the cheapest reachable location (ties by id), moves it from
/// remaining to visited and returns it.
std::optional<SearchLocation> next_location(SearchAgenda& agenda, const std::string& object,
                                            const PathLengthFn& path_length, const std::string& user_room,
                                            const ProbabilityTable& table, const CostParams& params,
                                            double normalizer);

std::optional<SearchLocation> next_location(SearchAgenda& agenda, const std::string& object, const Pose2& robot,
                                            const std::string& user_room, const ProbabilityTable& table,
                                            const CostParams& params, const WorldModel& world);

struct Sighting {
  std::string object;
  Vec2 position;
};

/// Credits each sighting to the Euclidean-nearest location (ties by id).
ProbabilityTable update_probabilities(ProbabilityTable table, const std::vector<Sighting>& sightings,
                                      const std::vector<SearchLocation>& locations);

struct Annotation {
  std::string id;
  Pose2 pose;
};

/// Throws InvalidAnnotation for occupied/off-map poses or duplicate ids.
SearchAgenda build_agenda_manual(const WorldModel& world, const std::vector<Annotation>& annotations);

/// Polygon centroid snapped to the nearest Free cell inside the room.
std::optional<Pose2> room_center_pose(const WorldModel& world, const std::string& room_id);

/// Rotation scan from `center`, surface extraction and position generation
/// for `room`. Ids are `id_prefix` + cluster/pair suffix.
GeneratedPositions scan_positions(const WorldModel& world, const std::string& room, const Pose2& center,
                                  const HeuristicParams& params, const PerceptionNoise& noise, Rng& rng,
                                  const std::string& id_prefix, const SenseOptions& sense = {},
                                  std::vector<TableCluster>* clusters = nullptr);

struct GeneratedAgenda {
  SearchAgenda agenda;
  Pose2 center;
  Path approach;
  std::vector<LabeledCloud> clouds;
  std::vector<TableCluster> clusters;
  std::size_t candidates = 0;
  double travel_seconds = 0.0;
  double scan_seconds = 0.0;
};

/// Drives to the room's center pose, runs the rotation scan and turns the
/// detected surfaces into search positions. Throws RoomUnreachable.
GeneratedAgenda build_agenda_generated(const WorldModel& world, const std::string& room, const Pose2& robot,
                                       const HeuristicParams& params, const PerceptionNoise& noise, Rng& rng,
                                       const DurationModel& durations, bool concurrent_scan = false,
                                       const SenseOptions& sense = {});

}  // namespace fetchsim
