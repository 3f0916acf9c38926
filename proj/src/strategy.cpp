#include "fetchsim/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fetchsim/errors.hpp"
#include "json_util.hpp"

namespace fetchsim {

void CostParams::validate() const {
  if (!(k1 >= 0) || !(k2 >= 0)) throw InvariantViolation("cost", "k1 and k2 must be >= 0");
  if (!(k_pen > 0)) throw InvariantViolation("cost", "k_pen must be > 0");
  if (bat_normalizer && !(*bat_normalizer > 0)) throw InvariantViolation("cost", "bat_normalizer must be > 0");
}

ProbabilityTable::ProbabilityTable(std::vector<std::string> locations, double alpha)
    : locations_(std::move(locations)), alpha_(alpha) {
  if (!(alpha > 0)) throw InvariantViolation("probability table", "alpha must be > 0");
  std::sort(locations_.begin(), locations_.end());
  locations_.erase(std::unique(locations_.begin(), locations_.end()), locations_.end());
}

bool ProbabilityTable::knows(const std::string& location) const {
  return std::binary_search(locations_.begin(), locations_.end(), location);
}

int ProbabilityTable::count(const std::string& object, const std::string& location) const {
  auto it = counts_.find(object);
  if (it == counts_.end()) return 0;
  auto jt = it->second.find(location);
  return jt == it->second.end() ? 0 : jt->second;
}

std::optional<double> ProbabilityTable::probability(const std::string& object, const std::string& location) const {
  if (!knows(location)) return std::nullopt;
  int total = 0;
  if (auto it = counts_.find(object); it != counts_.end())
    for (const auto& [loc, n] : it->second) total += n;
  const double denom = alpha_ * static_cast<double>(locations_.size()) + total;
  return (alpha_ + count(object, location)) / denom;
}

void ProbabilityTable::record(const std::string& object, const std::string& location, int times) {
  if (!knows(location)) throw InvariantViolation("probability table", "unknown location '" + location + "'");
  if (times < 0) throw InvariantViolation("probability table", "counts never decrease");
  counts_[object][location] += times;
}

nlohmann::json ProbabilityTable::to_json() const {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [object, per_loc] : counts_)
    for (const auto& [loc, n] : per_loc) counts[object][loc] = n;
  return {{"alpha", alpha_}, {"locations", locations_}, {"counts", counts}};
}

ProbabilityTable ProbabilityTable::from_json(const nlohmann::json& doc) {
  ProbabilityTable t(detail::get<std::vector<std::string>>(doc, "locations", "$"),
                     detail::get_or<double>(doc, "alpha", "$", 1.0));
  if (doc.contains("counts")) {
    const auto& counts = doc.at("counts");
    if (!counts.is_object()) throw SchemaError("$.counts", "expected an object");
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (!it->is_object()) throw SchemaError("$.counts." + it.key(), "expected an object");
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        if (!jt->is_number_integer() || jt->get<int>() < 0)
          throw SchemaError("$.counts." + it.key() + "." + jt.key(), "expected a non-negative integer");
        if (!t.knows(jt.key()))
          throw SchemaError("$.counts." + it.key() + "." + jt.key(), "location is not listed in $.locations");
        t.record(it.key(), jt.key(), jt->get<int>());
      }
    }
  }
  return t;
}

std::string to_string(StrategyKind s) { return s == StrategyKind::Manual ? "manual" : "semantic"; }

std::optional<StrategyKind> strategy_from_string(const std::string& s) {
  if (s == "manual" || s == "predefined" || s == "P") return StrategyKind::Manual;
  if (s == "semantic" || s == "generated" || s == "S") return StrategyKind::Generated;
  return std::nullopt;
}

std::optional<double> cost(const std::string& object, const SearchLocation& location,
                           std::optional<double> path_length, const std::string& user_room,
                           const ProbabilityTable& table, const CostParams& params, double normalizer,
                           double fallback_probability) {
  if (!path_length) return std::nullopt;
  const double p = table.probability(object, location.id).value_or(fallback_probability);
  const double prob_term = params.transform == ProbabilityTransform::Linear ? -params.k1 * p : -params.k1 * std::log(p);
  const double penalty = location.room_id == user_room ? params.k_pen : 0.0;
  return *path_length / normalizer + prob_term + params.k2 * penalty;
}

std::optional<double> cost(const std::string& object, const SearchLocation& location, const Pose2& robot,
                           const std::string& user_room, const ProbabilityTable& table, const CostParams& params,
                           const WorldModel& world) {
  const DistanceField field(world, robot.position());
  const double fallback = table.locations().empty() ? 1.0 : 1.0 / static_cast<double>(table.locations().size());
  return cost(object, location, field.length_to(location.pose.position()), user_room, table, params,
              params.normalizer(world), fallback);
}

std::optional<SearchLocation> next_location(SearchAgenda& agenda, const std::string& object,
                                            const PathLengthFn& path_length, const std::string& user_room,
                                            const ProbabilityTable& table, const CostParams& params,
                                            double normalizer) {
  if (agenda.remaining.empty()) return std::nullopt;
  const double fallback = 1.0 / static_cast<double>(agenda.size());
  std::optional<std::size_t> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < agenda.remaining.size(); ++i) {
    const auto& loc = agenda.remaining[i];
    const auto c = cost(object, loc, path_length(loc), user_room, table, params, normalizer, fallback);
    if (!c) continue;
    if (!best || *c < best_cost || (*c == best_cost && loc.id < agenda.remaining[*best].id)) {
      best = i;
      best_cost = *c;
    }
  }
  if (!best) return std::nullopt;
  SearchLocation chosen = agenda.remaining[*best];
  agenda.remaining.erase(agenda.remaining.begin() + static_cast<std::ptrdiff_t>(*best));
  agenda.visited.push_back(chosen);
  return chosen;
}

std::optional<SearchLocation> next_location(SearchAgenda& agenda, const std::string& object, const Pose2& robot,
                                            const std::string& user_room, const ProbabilityTable& table,
                                            const CostParams& params, const WorldModel& world) {
  const DistanceField field(world, robot.position());
  return next_location(
      agenda, object, [&](const SearchLocation& l) { return field.length_to(l.pose.position()); }, user_room, table,
      params, params.normalizer(world));
}

ProbabilityTable update_probabilities(ProbabilityTable table, const std::vector<Sighting>& sightings,
                                      const std::vector<SearchLocation>& locations) {
  if (locations.empty()) return table;
  for (const auto& s : sightings) {
    const SearchLocation* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : locations) {
      const double d = distance(l.pose.position(), s.position);
      if (d < best || (d == best && nearest && l.id < nearest->id)) {
        best = d;
        nearest = &l;
      }
    }
    if (nearest && table.knows(nearest->id)) table.record(s.object, nearest->id);
  }
  return table;
}

SearchAgenda build_agenda_manual(const WorldModel& world, const std::vector<Annotation>& annotations) {
  SearchAgenda agenda;
  agenda.strategy = StrategyKind::Manual;
  std::set<std::string> ids;
  for (const auto& a : annotations) {
    if (a.id.empty()) throw InvalidAnnotation("annotation with empty id");
    if (!ids.insert(a.id).second) throw InvalidAnnotation("duplicate annotation id '" + a.id + "'");
    if (world.is_occupied(a.pose.position()))
      throw InvalidAnnotation("annotation '" + a.id + "' is off the map or on an occupied cell");
    SearchLocation loc;
    loc.id = a.id;
    loc.pose = a.pose;
    loc.room_id = world.room_of(a.pose.position()).value_or("");
    loc.source = LocationSource::Manual;
    agenda.remaining.push_back(std::move(loc));
  }
  return agenda;
}

std::optional<Pose2> room_center_pose(const WorldModel& world, const std::string& room_id) {
  const Room* room = world.find_room(room_id);
  if (!room) return std::nullopt;
  const Vec2 centroid = polygon_centroid(room->polygon);
  const auto& grid = world.grid();
  std::optional<Vec2> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int row = 0; row < grid.height(); ++row)
    for (int col = 0; col < grid.width(); ++col) {
      if (grid.at(col, row) != Cell::Free) continue;
      const Vec2 c = grid.center_of({col, row});
      const double d = distance(c, centroid);
      if (d < best_d && contains(room->polygon, c)) {
        best_d = d;
        best = c;
      }
    }
  if (!best) return std::nullopt;
  return Pose2{best->x, best->y, 0.0};
}

GeneratedPositions scan_positions(const WorldModel& world, const std::string& room, const Pose2& center,
                                  const HeuristicParams& params, const PerceptionNoise& noise, Rng& rng,
                                  const std::string& id_prefix, const SenseOptions& sense,
                                  std::vector<TableCluster>* clusters) {
  const auto clouds = rotation_scan(world, center, noise, rng, 30.0, 360.0, sense);
  auto found = extract_table_clusters(clouds, params);
  auto out = generate_positions(found, room, world, params, id_prefix);
  if (clusters) *clusters = std::move(found);
  return out;
}

GeneratedAgenda build_agenda_generated(const WorldModel& world, const std::string& room, const Pose2& robot,
                                       const HeuristicParams& params, const PerceptionNoise& noise, Rng& rng,
                                       const DurationModel& durations, bool concurrent_scan,
                                       const SenseOptions& sense) {
  const auto center = room_center_pose(world, room);
  if (!center) throw RoomUnreachable("room '" + room + "' has no free center pose");
  const DistanceField field(world, robot.position());
  auto path = field.path_to(center->position());
  if (!path) throw RoomUnreachable("room '" + room + "' cannot be reached from the robot pose");

  GeneratedAgenda out;
  out.approach = std::move(*path);
  out.center = *center;
  const auto& wp = out.approach.waypoints;
  out.center.yaw = wp.size() >= 2 ? heading_to(wp[wp.size() - 2], wp.back()) : robot.yaw;
  out.travel_seconds = travel_time(out.approach, path_turns(out.approach, robot.yaw), durations);

  constexpr double kStepDeg = 30.0, kTotalDeg = 360.0;
  out.clouds = rotation_scan(world, out.center, noise, rng, kStepDeg, kTotalDeg, sense);
  out.scan_seconds = scan_duration(rotation_steps(kStepDeg, kTotalDeg), durations, concurrent_scan);
  out.clusters = extract_table_clusters(out.clouds, params);
  auto generated = generate_positions(out.clusters, room, world, params, room + ":");
  out.candidates = generated.candidates;
  out.agenda.strategy = StrategyKind::Generated;
  out.agenda.remaining = std::move(generated.positions);
  return out;
}

}  // namespace fetchsim
