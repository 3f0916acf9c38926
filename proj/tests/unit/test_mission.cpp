#include <doctest.h>

#include <algorithm>

#include "fetchsim/errors.hpp"
#include "fetchsim/experiment.hpp"
#include "fetchsim/mission.hpp"
#include "helpers.hpp"

using namespace fetchsim;
using testutil::rect;

namespace {

bool has_concurrent(const hsm::MachineSpec& m) {
  if (m.kind == hsm::ContainerKind::Concurrent) return true;
  for (const auto& c : m.children)
    if (c.is_machine() && has_concurrent(*std::get<hsm::MachinePtr>(c.node))) return true;
  return false;
}

bool has_state(const hsm::MachineSpec& m, const std::string& name) {
  for (const auto& c : m.children) {
    if (c.name() == name) return true;
    if (c.is_machine() && has_state(*std::get<hsm::MachinePtr>(c.node), name)) return true;
  }
  return false;
}

MissionConfig config(std::string object, StrategyKind kind, std::uint64_t seed = 0) {
  MissionConfig c;
  c.target_object = std::move(object);
  c.strategy = kind;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("mission machines validate and have the expected shape") {
  const auto& s = testutil::lab();
  const auto table = annotation_table(s);
  auto manual = build_mission(config("wallet", StrategyKind::Manual), s, table);
  CHECK(hsm::validate(*manual.machine).ok());
  CHECK_FALSE(has_state(*manual.machine, "rotate"));
  CHECK_FALSE(has_state(*manual.machine, "SCAN_ROOM"));

  auto seq = build_mission(config("wallet", StrategyKind::Generated), s, table);
  CHECK(hsm::validate(*seq.machine).ok());
  CHECK(has_state(*seq.machine, "SCAN_ROOM"));
  CHECK_FALSE(has_concurrent(*seq.machine));

  auto cfg = config("wallet", StrategyKind::Generated);
  cfg.concurrent_scan = true;
  auto conc = build_mission(cfg, s, table);
  CHECK(hsm::validate(*conc.machine).ok());
  CHECK(has_concurrent(*conc.machine));

  CHECK_THROWS_AS(build_mission(config("unicorn", StrategyKind::Manual), s, table), InvariantViolation);
}

TEST_CASE("single table, single annotation") {
  const auto f = testutil::table("t", rect(2.0, 2.0, 3.0, 3.0));
  const SceneObject cup{"cup", "cup", {2.5, 2.5, 0.75, 0}, "t"};
  Scenario s{testutil::single_room(50, 50, 0.1, {f}, {cup}, {1.05, 1.05, 0}), {{"front", {1.65, 2.55, 0}}}, {}, {},
             {}, {}};
  const auto r = run_mission(config("cup", StrategyKind::Manual), s, annotation_table(s));
  CHECK(r.object_detected == DetectionStatus::Found);
  CHECK(r.positions_visited == 1);
  CHECK(r.grasped);
  CHECK(r.on_tray);
  CHECK(r.user_informed);
  CHECK(r.outcome == "succeeded");
  CHECK(r.message == "I found the cup on the table in the room.");
  CHECK(r.time.total() == doctest::Approx(r.duration));
}

TEST_CASE("nothing recognized: every room searched, user still informed") {
  const auto& s = testutil::lab();
  auto cfg = config("wallet", StrategyKind::Generated, 3);
  PerceptionNoise n = s.noise;
  n.p_true_positive = 0.0;
  cfg.noise = n;
  const auto r = run_mission(cfg, s, annotation_table(s));
  CHECK(r.object_detected == DetectionStatus::NotFound);
  CHECK(r.rooms_searched.size() == s.world.rooms().size());
  CHECK(r.user_informed);
  CHECK(r.message == "I could not find the wallet.");
  CHECK(r.outcome == "failed");
  CHECK(r.positions_visited == r.positions_total);

  cfg.strategy = StrategyKind::Manual;
  const auto m = run_mission(cfg, s, annotation_table(s));
  CHECK(m.positions_visited == 9);
  CHECK(m.object_detected == DetectionStatus::NotFound);
}

TEST_CASE("scan timing inside the mission") {
  const auto& s = testutil::lab();
  auto cfg = config("asus_box", StrategyKind::Generated, 1);
  const auto seq = run_mission(cfg, s, annotation_table(s));
  cfg.concurrent_scan = true;
  const auto conc = run_mission(cfg, s, annotation_table(s));
  const double rooms = static_cast<double>(seq.rooms_searched.size());
  CHECK(seq.time.scanning == doctest::Approx(108.0 * rooms));
  CHECK(conc.time.scanning == doctest::Approx(64.0 * rooms));
  CHECK(seq.duration - conc.duration == doctest::Approx(44.0 * rooms));
  CHECK(seq.visited_locations == conc.visited_locations);
}

TEST_CASE("reports are deterministic and consistent") {
  const auto& s = testutil::lab();
  for (auto kind : {StrategyKind::Manual, StrategyKind::Generated}) {
    const auto a = run_mission(config("asus_box", kind, 42), s, annotation_table(s));
    const auto b = run_mission(config("asus_box", kind, 42), s, annotation_table(s));
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    CHECK(a.time.total() == doctest::Approx(a.duration));
    CHECK(a.positions_visited == static_cast<int>(a.visited_locations.size()));
    CHECK(a.message.find("dining room") != std::string::npos);
  }
}

TEST_CASE("finding the user") {
  const auto& s = testutil::lab();
  Rng rng(1);
  const auto first = inform_user(s.world, s.world.agent().robot_pose, std::nullopt, "wallet", s.noise, rng,
                                 s.durations);
  CHECK(first.informed);
  CHECK(first.search.rooms == std::vector<std::string>{"bedroom"});

  AgentState moved = s.world.agent();
  moved.user_room_actual = "living_room";
  const auto w = s.world.with_agent(moved);
  const auto later = inform_user(w, w.agent().robot_pose, std::nullopt, "wallet", s.noise, rng, s.durations);
  CHECK(later.informed);
  REQUIRE(later.search.rooms.size() >= 2);
  CHECK(later.search.rooms.front() == "bedroom");
  CHECK(later.search.rooms.back() == "living_room");
}

TEST_CASE("location phrases") {
  const auto& w = testutil::lab().world;
  CHECK(describe_location(w, {1.2, 2.5, 0.75}) == "on the table in the dining room");
  CHECK(describe_location(w, {6.0, 6.0, 0.0}) == "in the central hall");
  CHECK(describe_location(w, {4.55, 1.0, 0.0}) == "somewhere I cannot name");
  CHECK(format_mmss(443.4) == "7:23");
  CHECK(format_mmss(59.6) == "1:00");
}

TEST_CASE("experiments") {
  const auto& s = testutil::lab();
  CHECK(run_experiment(s, {}).rows.empty());
  ExperimentSpec spec;
  ExperimentTest t;
  t.name = "a";
  t.object = "asus_box";
  t.seed_manual = t.seed_generated = 1;
  PerceptionNoise noisy = s.noise;
  noisy.label_flip_rate = 0.2;
  t.noise_generated = noisy;
  spec.tests = {t, t};
  spec.tests[1].seed_generated = 2;
  const auto a = run_experiment(s, spec);
  const auto b = run_experiment(s, spec);
  REQUIRE(a.rows.size() == 2);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_markdown().find("| a | asus_box |") != std::string::npos);
}
