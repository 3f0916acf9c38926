#include "fetchsim/experiment.hpp"

#include <fstream>
#include <sstream>

#include "fetchsim/errors.hpp"
#include "json_util.hpp"

namespace fetchsim {

using detail::get;
using detail::get_or;
using nlohmann::json;

namespace {

Pose2 pose_from(const json& doc, const std::string& path) {
  return {get<double>(doc, "x", path), get<double>(doc, "y", path), get_or<double>(doc, "yaw", path, 0.0)};
}

std::optional<PerceptionNoise> noise_override(const json& test, const std::string& key, const std::string& path,
                                              const PerceptionNoise& base) {
  std::optional<PerceptionNoise> out;
  if (test.contains("noise")) out = noise_from_json(test.at("noise"), base, path + ".noise");
  if (test.contains(key)) out = noise_from_json(test.at(key), out.value_or(base), path + "." + key);
  return out;
}

}  // namespace

ExperimentSpec experiment_from_json(const json& doc, const PerceptionNoise& base) {
  ExperimentSpec spec;
  spec.concurrent_scan = get_or<bool>(doc, "concurrent_scan", "$", false);
  spec.learn = get_or<bool>(doc, "learn", "$", false);
  const json& tests = detail::require_array(doc, "tests", "$");
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const std::string path = detail::at_index("tests", i);
    const json& t = tests[i];
    ExperimentTest test;
    test.name = get_or<std::string>(t, "name", path, "Test " + std::to_string(i + 1));
    test.object = get<std::string>(t, "object", path);
    if (t.contains("placement")) {
      const json& p = t.at("placement");
      ObjectPlacement placement{get<std::string>(p, "on", path + ".placement"), std::nullopt};
      if (p.contains("x") || p.contains("y"))
        placement.position = Vec2{get<double>(p, "x", path + ".placement"), get<double>(p, "y", path + ".placement")};
      test.placement = placement;
    }
    if (t.contains("robot")) test.robot = pose_from(t.at("robot"), path + ".robot");
    if (t.contains("start_room")) test.start_room = get<std::string>(t, "start_room", path);
    if (t.contains("user_room")) test.user_room = get<std::string>(t, "user_room", path);
    if (t.contains("user_actual_room")) test.user_actual_room = get<std::string>(t, "user_actual_room", path);
    test.noise_manual = noise_override(t, "noise_manual", path, base);
    test.noise_generated = noise_override(t, "noise_semantic", path, base);
    const auto seed = get_or<std::uint64_t>(t, "seed", path, 0);
    test.seed_manual = get_or<std::uint64_t>(t, "seed_manual", path, seed);
    test.seed_generated = get_or<std::uint64_t>(t, "seed_semantic", path, seed);
    spec.tests.push_back(std::move(test));
  }
  return spec;
}

ExperimentSpec load_experiment_file(const std::filesystem::path& path, const PerceptionNoise& base) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string(), "cannot open experiment file");
  try {
    return experiment_from_json(json::parse(in), base);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

Scenario apply_test(const Scenario& scenario, const ExperimentTest& test) {
  Scenario out = scenario;
  const WorldModel& world = scenario.world;
  const SceneObject* target = world.find_object(test.object);
  if (!target) throw InvariantViolation(test.object, "unknown object in test '" + test.name + "'");

  if (test.placement) {
    const Furniture* f = world.find_furniture(test.placement->furniture);
    if (!f) throw InvariantViolation(test.placement->furniture, "unknown furniture in test '" + test.name + "'");
    const Vec2 at = test.placement->position.value_or(polygon_centroid(f->footprint));
    auto objects = world.objects();
    for (auto& o : objects) {
      if (o.id != target->id) continue;
      o.pose = {at.x, at.y, f->surface_height, o.pose.yaw};
      o.supporting_furniture = f->id;
    }
    out.world = out.world.with_objects(std::move(objects));
  }

  AgentState agent = out.world.agent();
  if (test.robot) agent.robot_pose = *test.robot;
  if (test.start_room) {
    const auto center = room_center_pose(out.world, *test.start_room);
    if (!center) throw InvariantViolation(*test.start_room, "start room has no free center pose");
    agent.robot_pose = *center;
  }
  if (test.user_room) {
    agent.user_room_last_seen = *test.user_room;
    agent.user_room_actual = *test.user_room;
  }
  if (test.user_actual_room) agent.user_room_actual = *test.user_actual_room;
  out.world = out.world.with_agent(std::move(agent));
  return out;
}

ComparisonTable run_experiment(const Scenario& scenario, const ExperimentSpec& spec) {
  ComparisonTable table;
  for (const auto& test : spec.tests) {
    const Scenario s = apply_test(scenario, test);
    const auto prior = annotation_table(s);
    MissionConfig cfg;
    cfg.target_object = test.object;
    cfg.concurrent_scan = spec.concurrent_scan;
    cfg.learn = spec.learn;

    cfg.strategy = StrategyKind::Manual;
    cfg.seed = test.seed_manual;
    cfg.noise = test.noise_manual;
    auto manual = run_mission(cfg, s, prior);

    cfg.strategy = StrategyKind::Generated;
    cfg.seed = test.seed_generated;
    cfg.noise = test.noise_generated;
    auto generated = run_mission(cfg, s, prior);

    table.rows.push_back({test.name, test.object, std::move(manual), std::move(generated)});
  }
  return table;
}

std::string ComparisonTable::to_markdown() const {
  std::ostringstream out;
  out << "| Test | Object | P: detected | P: duration | P: #p | S: detected | S: duration | S: #p |\n"
      << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| " << r.test << " | " << r.object << " | " << to_string(r.manual.object_detected) << " | "
        << format_mmss(r.manual.duration) << " | " << r.manual.positions_visited << "/" << r.manual.positions_total
        << " | " << to_string(r.generated.object_detected) << " | " << format_mmss(r.generated.duration) << " | "
        << r.generated.positions_visited << "/" << r.generated.positions_total << " |\n";
  }
  return out.str();
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream out;
  out << "test,object,strategy,detected,duration_s,duration,positions_visited,positions_total\n";
  for (const auto& r : rows) {
    for (const MissionReport* m : {&r.manual, &r.generated}) {
      out << r.test << ',' << r.object << ',' << to_string(m->strategy) << ',' << to_string(m->object_detected)
          << ',' << m->duration << ',' << format_mmss(m->duration) << ',' << m->positions_visited << ','
          << m->positions_total << '\n';
    }
  }
  return out.str();
}

json ComparisonTable::to_json() const {
  json arr = json::array();
  for (const auto& r : rows) {
    auto summary = [](const MissionReport& m) {
      return json{{"detected", to_string(m.object_detected)},
                  {"duration_s", m.duration},
                  {"duration", format_mmss(m.duration)},
                  {"positions_visited", m.positions_visited},
                  {"positions_total", m.positions_total},
                  {"visited_locations", m.visited_locations},
                  {"rooms_searched", m.rooms_searched},
                  {"user_informed", m.user_informed},
                  {"message", m.message}};
    };
    arr.push_back({{"test", r.test},
                   {"object", r.object},
                   {"manual", summary(r.manual)},
                   {"semantic", summary(r.generated)}});
  }
  return json{{"rows", arr}};
}

}  // namespace fetchsim
