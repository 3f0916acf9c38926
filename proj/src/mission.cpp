#include "fetchsim/mission.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "fetchsim/errors.hpp"

namespace fetchsim {

using hsm::ContainerKind;
using hsm::MachineBuilder;
using hsm::StateContext;
using hsm::StateSpec;
using nlohmann::json;

namespace {

constexpr double kScanStepDeg = 30.0;
constexpr double kScanTotalDeg = 360.0;

double deg(double d) { return d * std::numbers::pi / 180.0; }

std::string room_label(const WorldModel& world, const std::string& id) {
  const Room* r = world.find_room(id);
  return r ? r->label : id;
}

}  // namespace

void MissionConfig::validate() const {
  if (target_object.empty()) throw InvariantViolation("mission", "target object is empty");
  if (!(grasp_success_probability >= 0.0 && grasp_success_probability <= 1.0))
    throw InvariantViolation("mission", "grasp success probability must lie in [0, 1]");
  if (room_order == RoomOrder::Fixed && fixed_room_order.empty())
    throw InvariantViolation("mission", "fixed room order is empty");
  if (noise) noise->validate();
}

std::string to_string(DetectionStatus s) {
  switch (s) {
    case DetectionStatus::Found: return "Y";
    case DetectionStatus::NotFound: return "N";
    case DetectionStatus::FalsePositive: return "N*";
  }
  return "N";
}

std::string format_mmss(double seconds) {
  const long total = std::lround(seconds);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%ld:%02ld", total / 60, total % 60);
  return buf;
}

std::string describe_location(const WorldModel& world, const Pose6& pose) {
  const Vec2 p{pose.x, pose.y};
  const auto room = world.room_of(p);
  for (const auto& f : world.furniture()) {
    if (!contains(f.footprint, p)) continue;
    std::string out = "on the " + to_string(f.cls);
    const std::string& r = room ? *room : f.room_id;
    if (!r.empty()) out += " in the " + room_label(world, r);
    return out;
  }
  if (room) return "in the " + room_label(world, *room);
  return "somewhere I cannot name";
}

std::string inform_message(const WorldModel& world, const std::string& object,
                           const std::optional<Detection>& detection) {
  if (!detection) return "I could not find the " + object + ".";
  return "I found the " + object + " " + describe_location(world, detection->pose) + ".";
}

UserSearch find_user(const WorldModel& world, const Pose2& robot, const PerceptionNoise& noise, Rng& rng,
                     const DurationModel& durations) {
  UserSearch out;
  out.final_pose = robot;
  std::vector<std::string> pending;
  for (const auto& r : world.rooms()) pending.push_back(r.id);

  std::string next = world.agent().user_room_last_seen;
  while (!pending.empty()) {
    const DistanceField field(world, out.final_pose.position());
    std::optional<Path> best_path;
    std::size_t best = pending.size();
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto center = room_center_pose(world, pending[i]);
      if (!center) continue;
      auto path = field.path_to(center->position());
      if (!path) continue;
      const bool preferred = pending[i] == next;
      if (preferred || !best_path || path->length < best_path->length) {
        best_path = std::move(path);
        best = i;
        if (preferred) break;
      }
    }
    next.clear();
    if (best == pending.size()) break;

    const std::string room = pending[best];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
    const auto& wp = best_path->waypoints;
    const double yaw = wp.size() >= 2 ? heading_to(wp[wp.size() - 2], wp.back()) : out.final_pose.yaw;
    out.navigation_seconds += travel_time(*best_path, path_turns(*best_path, out.final_pose.yaw), durations);
    out.final_pose = {wp.back().x, wp.back().y, yaw};
    out.rooms.push_back(room);
    out.detection_seconds += durations.user_detection_time;
    if (detect_user(world, room, noise, rng)) {
      out.found = true;
      break;
    }
  }
  return out;
}

InformOutcome inform_user(const WorldModel& world, const Pose2& robot, const std::optional<Detection>& detection,
                          const std::string& object, const PerceptionNoise& noise, Rng& rng,
                          const DurationModel& durations) {
  InformOutcome out;
  out.search = find_user(world, robot, noise, rng, durations);
  out.seconds = out.search.navigation_seconds + out.search.detection_seconds;
  if (out.search.found) {
    out.informed = true;
    out.message = inform_message(world, object, detection);
    out.seconds += durations.inform_time;
  }
  return out;
}

ProbabilityTable annotation_table(const Scenario& scenario, double alpha) {
  std::vector<std::string> ids;
  for (const auto& a : scenario.annotations) ids.push_back(a.id);
  return ProbabilityTable(std::move(ids), alpha);
}

/// Everything the state bodies share besides the userdata: the robot's
/// physical pose, the agendas, the random stream and the bookkeeping the
/// report needs.
struct MissionState {
  const Scenario* scenario = nullptr;
  MissionConfig config;
  PerceptionNoise noise;
  SenseOptions sense;
  Rng rng;
  ProbabilityTable table;
  std::vector<SearchLocation> annotation_locations;
  SearchAgenda agenda;

  Pose2 robot;
  std::vector<std::string> rooms_left;
  Pose2 scan_center;
  double scan_started = 0.0;
  std::vector<LabeledCloud> clouds;
  std::vector<Detection> last_detections;
  std::optional<Detection> detection;

  TimeBreakdown time;
  std::vector<std::string> visited;
  std::vector<std::string> rooms_searched;
  std::vector<std::string> user_rooms;
  std::string message;

  const WorldModel& world() const { return scenario->world; }
  const DurationModel& durations() const { return scenario->durations; }
  double normalizer() const { return scenario->cost.normalizer(world()); }
};

namespace {

using StatePtr = std::shared_ptr<MissionState>;

StateSpec make_state(std::string name, std::vector<std::string> outcomes, std::set<std::string> in,
                     std::set<std::string> out, hsm::Body body) {
  StateSpec s;
  s.name = std::move(name);
  s.outcomes = std::move(outcomes);
  s.input_keys = std::move(in);
  s.output_keys = std::move(out);
  s.body = std::move(body);
  return s;
}

void note_room(MissionState& m, const std::string& room) {
  if (m.rooms_searched.empty() || m.rooms_searched.back() != room) m.rooms_searched.push_back(room);
}

// Search over the current agenda until the target is recognized or the
// agenda runs dry.
hsm::MachinePtr build_locate(const StatePtr& m) {
  MachineBuilder b("LOCATE_OBJECT", ContainerKind::Sequential, {"found", "exhausted"});

  b.add(make_state("select_location", {"selected", "exhausted"}, {"target"}, {}, [m](StateContext& ctx) {
          const auto& world = m->world();
          const auto next = next_location(m->agenda, ctx.get("target").get<std::string>(), m->robot,
                                          world.agent().user_room_last_seen, m->table, m->scenario->cost, world);
          return next ? "selected" : "exhausted";
        }),
        {{"selected", "move_to_location"}, {"exhausted", "exhausted"}});

  b.add(make_state("move_to_location", {"arrived"}, {"positions_visited"}, {"positions_visited"},
                   [m](StateContext& ctx) {
                     const SearchLocation& loc = m->agenda.visited.back();
                     const auto path = plan(m->robot.position(), loc.pose.position(), m->world());
                     if (!path) throw InvariantViolation(loc.id, "selected location became unreachable");
                     const double t = travel_time(*path, path_turns(*path, m->robot.yaw, loc.pose.yaw),
                                                  m->durations());
                     ctx.charge(t);
                     m->time.navigation += t;
                     m->robot = loc.pose;
                     m->visited.push_back(loc.id);
                     if (!loc.room_id.empty()) note_room(*m, loc.room_id);
                     ctx.set("positions_visited", ctx.get("positions_visited").get<int>() + 1);
                     return "arrived";
                   }),
        {{"arrived", "recognize"}});

  b.add(make_state("recognize", {"recognized", "not_recognized"}, {"target"}, {"object_detected"},
                   [m](StateContext& ctx) {
                     const std::string target = ctx.get("target").get<std::string>();
                     ctx.charge(m->durations().recognition_time);
                     m->time.recognition += m->durations().recognition_time;
                     m->last_detections = recognize_objects(m->world(), m->robot, target, m->noise, m->rng).detections;
                     const Detection* pick = nullptr;
                     for (const auto& d : m->last_detections) {
                       if (d.name != target) continue;
                       if (!pick || (d.true_positive && !pick->true_positive)) pick = &d;
                     }
                     if (!pick) return "not_recognized";
                     m->detection = *pick;
                     ctx.set("object_detected", to_string(pick->true_positive ? DetectionStatus::Found
                                                                              : DetectionStatus::FalsePositive));
                     return "recognized";
                   }),
        {{"recognized", "grasp"}, {"not_recognized", "update_probabilities"}});

  b.add(make_state("grasp", {"grasped", "failed"}, {}, {"grasped"}, [m](StateContext& ctx) {
          ctx.charge(m->durations().grasp_time);
          m->time.manipulation += m->durations().grasp_time;
          const bool ok = m->detection && m->detection->true_positive &&
                          m->rng.bernoulli(m->config.grasp_success_probability);
          ctx.set("grasped", ok);
          return ok ? "grasped" : "failed";
        }),
        {{"grasped", "put_on_tray"}, {"failed", "update_probabilities"}});

  b.add(make_state("put_on_tray", {"done"}, {}, {"on_tray"}, [m](StateContext& ctx) {
          ctx.charge(m->durations().tray_time);
          m->time.manipulation += m->durations().tray_time;
          ctx.set("on_tray", true);
          return "done";
        }),
        {{"done", "update_probabilities"}});

  b.add(make_state("update_probabilities", {"found", "searching"}, {"object_detected"}, {},
                   [m](StateContext& ctx) {
                     if (m->config.learn && !m->last_detections.empty()) {
                       std::vector<Sighting> sightings;
                       for (const auto& d : m->last_detections) sightings.push_back({d.name, {d.pose.x, d.pose.y}});
                       m->table = update_probabilities(std::move(m->table), sightings, m->annotation_locations);
                     }
                     m->last_detections.clear();
                     return ctx.get("object_detected").get<std::string>() == "N" ? "searching" : "found";
                   }),
        {{"found", "found"}, {"searching", "select_location"}});
  return b.build();
}

hsm::MachinePtr build_scan(const StatePtr& m, int steps) {
  auto rotate = [m](StateContext& ctx) {
    ctx.charge(m->durations().rotate_step_time);
    m->robot.yaw = wrap_angle(m->robot.yaw + deg(kScanStepDeg));
    ctx.set("scan_rotations", ctx.get("scan_rotations").get<int>() + 1);
    return std::string("rotated");
  };
  auto segment = [m](StateContext& ctx) {
    const int k = ctx.get("scan_segmented").get<int>() + 1;
    Pose2 heading = m->scan_center;
    heading.yaw = wrap_angle(m->scan_center.yaw + k * deg(kScanStepDeg));
    m->clouds.push_back(sense_semantic(m->world(), heading, m->noise, m->rng, m->sense));
    ctx.charge(m->durations().segmentation_time);
    ctx.set("scan_segmented", k);
    return std::string("segmented");
  };
  auto rotate_state = [&](std::string name) {
    return make_state(std::move(name), {"rotated"}, {"scan_rotations"}, {"scan_rotations"}, rotate);
  };
  auto segment_state = [&](std::string name) {
    return make_state(std::move(name), {"segmented"}, {"scan_segmented"}, {"scan_segmented"}, segment);
  };

  MachineBuilder b("SCAN_ROOM", ContainerKind::Sequential, {"scanned"});
  if (!m->config.concurrent_scan) {
    b.add(rotate_state("rotate"), {{"rotated", "segment"}});
    b.add(segment_state("segment"), {{"segmented", "check_scan"}});
    b.add(make_state("check_scan", {"more", "done"}, {"scan_segmented"}, {},
                     [steps](StateContext& ctx) {
                       return ctx.get("scan_segmented").get<int>() < steps ? "more" : "done";
                     }),
          {{"more", "rotate"}, {"done", "scanned"}});
    return b.build();
  }

  // The segmentation of view k overlaps the rotation towards view k+1.
  MachineBuilder overlap("ROTATE_AND_SEGMENT", ContainerKind::Concurrent, {"stepped"});
  overlap.add(rotate_state("rotate"));
  overlap.add(segment_state("segment"));
  overlap.when({{"rotate", "rotated"}, {"segment", "segmented"}}, "stepped");
  overlap.otherwise("stepped");

  b.add(rotate_state("rotate_first"), {{"rotated", "check_scan"}});
  b.add(make_state("check_scan", {"more", "last"}, {"scan_rotations"}, {},
                   [steps](StateContext& ctx) {
                     return ctx.get("scan_rotations").get<int>() < steps ? "more" : "last";
                   }),
        {{"more", "ROTATE_AND_SEGMENT"}, {"last", "segment_last"}});
  b.add(overlap.build(), {{"stepped", "check_scan"}});
  b.add(segment_state("segment_last"), {{"segmented", "scanned"}});
  return b.build();
}

// Room loop of the generated strategy: pick a room, drive to its centre,
// scan, turn the surfaces into positions and search them.
hsm::MachinePtr build_room_search(const StatePtr& m) {
  const int steps = rotation_steps(kScanStepDeg, kScanTotalDeg);
  MachineBuilder b("SEARCH_ROOMS", ContainerKind::Sequential, {"found", "exhausted"});

  b.add(make_state("select_room", {"selected", "exhausted"}, {}, {"current_room"}, [m](StateContext& ctx) {
          const auto& world = m->world();
          std::optional<std::size_t> best;
          if (m->config.room_order == RoomOrder::Fixed) {
            if (!m->rooms_left.empty()) best = 0;
          } else {
            const DistanceField field(world, m->robot.position());
            const double norm = m->normalizer();
            const auto& cost = m->scenario->cost;
            double best_cost = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m->rooms_left.size(); ++i) {
              const auto center = room_center_pose(world, m->rooms_left[i]);
              if (!center) continue;
              const auto len = field.length_to(center->position());
              if (!len) continue;
              double c = *len / norm;
              if (m->rooms_left[i] == world.agent().user_room_last_seen) c += cost.k2 * cost.k_pen;
              if (c < best_cost) {
                best_cost = c;
                best = i;
              }
            }
          }
          if (!best) return "exhausted";
          const std::string room = m->rooms_left[*best];
          m->rooms_left.erase(m->rooms_left.begin() + static_cast<std::ptrdiff_t>(*best));
          ctx.set("current_room", room);
          return "selected";
        }),
        {{"selected", "go_to_room_center"}, {"exhausted", "exhausted"}});

  b.add(make_state("go_to_room_center", {"arrived", "unreachable"}, {"current_room"},
                   {"scan_rotations", "scan_segmented"},
                   [m](StateContext& ctx) {
                     const auto& world = m->world();
                     const auto room = ctx.get("current_room").get<std::string>();
                     const auto center = room_center_pose(world, room);
                     if (!center) return "unreachable";
                     const auto path = plan(m->robot.position(), center->position(), world);
                     if (!path) return "unreachable";
                     const auto& wp = path->waypoints;
                     const double t = travel_time(*path, path_turns(*path, m->robot.yaw), m->durations());
                     ctx.charge(t);
                     m->time.navigation += t;
                     m->robot = *center;
                     m->robot.yaw = wp.size() >= 2 ? heading_to(wp[wp.size() - 2], wp.back()) : m->robot.yaw;
                     m->scan_center = m->robot;
                     m->scan_started = ctx.now();
                     m->clouds.clear();
                     note_room(*m, room);
                     ctx.set("scan_rotations", 0);
                     ctx.set("scan_segmented", 0);
                     return "arrived";
                   }),
        {{"arrived", "SCAN_ROOM"}, {"unreachable", "select_room"}});

  b.add(build_scan(m, steps), {{"scanned", "extract_positions"}});

  b.add(make_state("extract_positions", {"positions", "none"}, {"current_room", "positions_total"},
                   {"positions_total"},
                   [m](StateContext& ctx) {
                     m->time.scanning += ctx.now() - m->scan_started;
                     const auto room = ctx.get("current_room").get<std::string>();
                     const auto& h = m->scenario->heuristics;
                     const auto clusters = extract_table_clusters(m->clouds, h);
                     auto generated = generate_positions(clusters, room, m->world(), h, room + ":");
                     m->clouds.clear();
                     m->agenda = SearchAgenda{std::move(generated.positions), {}, StrategyKind::Generated};
                     const int n = static_cast<int>(m->agenda.size());
                     ctx.set("positions_total", ctx.get("positions_total").get<int>() + n);
                     return n > 0 ? "positions" : "none";
                   }),
        {{"positions", "LOCATE_OBJECT"}, {"none", "select_room"}});

  b.add(build_locate(m), {{"found", "found"}, {"exhausted", "select_room"}});
  return b.build();
}

hsm::MachinePtr build_inform(const StatePtr& m) {
  MachineBuilder b("INFORM_USER", ContainerKind::Sequential, {"informed", "user_not_found"});
  b.add(make_state("search_user", {"detected", "not_detected"}, {}, {}, [m](StateContext& ctx) {
          const auto search = find_user(m->world(), m->robot, m->noise, m->rng, m->durations());
          ctx.charge(search.navigation_seconds + search.detection_seconds);
          m->time.navigation += search.navigation_seconds;
          m->time.user_interaction += search.detection_seconds;
          m->robot = search.final_pose;
          m->user_rooms = search.rooms;
          return search.found ? "detected" : "not_detected";
        }),
        {{"detected", "inform"}, {"not_detected", "user_not_found"}});
  b.add(make_state("inform", {"done"}, {"target"}, {"user_informed"}, [m](StateContext& ctx) {
          ctx.charge(m->durations().inform_time);
          m->time.user_interaction += m->durations().inform_time;
          m->message = inform_message(m->world(), ctx.get("target").get<std::string>(), m->detection);
          ctx.set("user_informed", true);
          return "done";
        }),
        {{"done", "informed"}});
  return b.build();
}

}  // namespace

MissionMachine build_mission(const MissionConfig& config, const Scenario& scenario, const ProbabilityTable& table) {
  config.validate();
  const auto& world = scenario.world;
  if (!world.find_object(config.target_object))
    throw InvariantViolation(config.target_object, "target object is not part of the scene");

  auto m = std::make_shared<MissionState>();
  m->scenario = &scenario;
  m->config = config;
  m->noise = config.noise.value_or(scenario.noise);
  m->sense.graspable_min = scenario.heuristics.band_min;
  m->sense.graspable_max = scenario.heuristics.band_max;
  m->rng = Rng(config.seed);
  m->table = table;
  m->robot = world.agent().robot_pose;
  m->annotation_locations = build_agenda_manual(world, scenario.annotations).remaining;

  MachineBuilder root("FETCH_AND_CARRY", ContainerKind::Sequential, {"succeeded", "failed"});
  root.inputs({"target", "object_detected", "grasped", "on_tray", "user_informed", "positions_visited",
               "positions_total"});

  if (config.strategy == StrategyKind::Manual) {
    m->agenda = SearchAgenda{m->annotation_locations, {}, StrategyKind::Manual};
    root.add(make_state("load_annotations", {"loaded"}, {}, {"positions_total"},
                        [m](StateContext& ctx) {
                          ctx.set("positions_total", static_cast<int>(m->agenda.size()));
                          return "loaded";
                        }),
             {{"loaded", "LOCATE_OBJECT"}});
    root.add(build_locate(m), {{"found", "INFORM_USER"}, {"exhausted", "INFORM_USER"}});
  } else {
    if (config.room_order == RoomOrder::Fixed) {
      for (const auto& r : config.fixed_room_order)
        if (!world.find_room(r)) throw InvariantViolation(r, "unknown room in fixed room order");
      m->rooms_left = config.fixed_room_order;
    } else {
      for (const auto& r : world.rooms()) m->rooms_left.push_back(r.id);
    }
    root.add(build_room_search(m), {{"found", "INFORM_USER"}, {"exhausted", "INFORM_USER"}});
  }

  root.add(build_inform(m), {{"informed", "conclude"}, {"user_not_found", "conclude"}});
  root.add(make_state("conclude", {"succeeded", "failed"}, {"object_detected", "user_informed"}, {},
                      [](StateContext& ctx) {
                        const bool found = ctx.get("object_detected").get<std::string>() != "N";
                        return found && ctx.get("user_informed").get<bool>() ? "succeeded" : "failed";
                      }),
           {{"succeeded", "succeeded"}, {"failed", "failed"}});

  MissionMachine out;
  out.machine = root.build();
  const auto report = hsm::validate(*out.machine);
  if (!report.ok()) {
    const auto& f = report.findings.front();
    throw InvariantViolation(f.path, f.kind + ": " + f.message);
  }
  out.initial = hsm::Userdata(json{{"target", config.target_object},
                                   {"object_detected", "N"},
                                   {"grasped", false},
                                   {"on_tray", false},
                                   {"user_informed", false},
                                   {"positions_visited", 0},
                                   {"positions_total", 0}});
  out.state = std::move(m);
  return out;
}

MissionReport run_mission(const MissionConfig& config, const Scenario& scenario, const ProbabilityTable& table) {
  auto mission = build_mission(config, scenario, table);
  hsm::SimClock clock(0.0);
  auto run = hsm::execute(*mission.machine, mission.initial, clock);
  const MissionState& m = *mission.state;
  const auto& ud = run.userdata;

  MissionReport r;
  r.target = config.target_object;
  r.strategy = config.strategy;
  r.seed = config.seed;
  r.outcome = run.outcome;
  const auto status = ud.at("object_detected").get<std::string>();
  r.object_detected = status == "Y" ? DetectionStatus::Found
                      : status == "N*" ? DetectionStatus::FalsePositive
                                       : DetectionStatus::NotFound;
  r.detection = m.detection;
  r.grasped = ud.at("grasped").get<bool>();
  r.on_tray = ud.at("on_tray").get<bool>();
  r.user_informed = ud.at("user_informed").get<bool>();
  r.message = m.message;
  r.duration = clock.now();
  r.positions_visited = ud.at("positions_visited").get<int>();
  r.positions_total = ud.at("positions_total").get<int>();
  r.visited_locations = m.visited;
  r.rooms_searched = m.rooms_searched;
  r.user_search_rooms = m.user_rooms;
  r.time = m.time;
  r.table = m.table;
  r.trace = std::move(run.trace);
  return r;
}

json report_to_json(const MissionReport& r) {
  json doc = {{"target", r.target},
              {"strategy", to_string(r.strategy)},
              {"seed", r.seed},
              {"outcome", r.outcome},
              {"object_detected", to_string(r.object_detected)},
              {"grasped", r.grasped},
              {"on_tray", r.on_tray},
              {"user_informed", r.user_informed},
              {"message", r.message},
              {"duration_s", r.duration},
              {"duration", format_mmss(r.duration)},
              {"positions_visited", r.positions_visited},
              {"positions_total", r.positions_total},
              {"visited_locations", r.visited_locations},
              {"rooms_searched", r.rooms_searched},
              {"user_search_rooms", r.user_search_rooms},
              {"time_s",
               {{"navigation", r.time.navigation},
                {"scanning", r.time.scanning},
                {"recognition", r.time.recognition},
                {"manipulation", r.time.manipulation},
                {"user_interaction", r.time.user_interaction}}},
              {"probabilities", r.table.to_json()},
              {"trace", hsm::trace_to_text(r.trace)}};
  if (r.detection) {
    const auto& d = *r.detection;
    doc["detection"] = {{"name", d.name},
                        {"pose", {d.pose.x, d.pose.y, d.pose.z, d.pose.roll, d.pose.pitch, d.pose.yaw}},
                        {"true_positive", d.true_positive}};
  }
  return doc;
}

}  // namespace fetchsim
