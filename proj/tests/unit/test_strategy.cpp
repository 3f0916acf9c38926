#include <doctest.h>

#include <cmath>

#include "fetchsim/errors.hpp"
#include "fetchsim/strategy.hpp"
#include "helpers.hpp"

using namespace fetchsim;
using testutil::rect;

namespace {

SearchLocation at(std::string id, std::string room, double x = 0, double y = 0) {
  SearchLocation l;
  l.id = std::move(id);
  l.room_id = std::move(room);
  l.pose = {x, y, 0};
  return l;
}

}  // namespace

TEST_CASE("cost arithmetic") {
  CostParams p;
  p.k1 = 1;
  p.k2 = 10;
  p.k_pen = 1;
  const ProbabilityTable empty;
  CHECK(*cost("cup", at("a", "kitchen"), 4.0, "kitchen", empty, p, 1.0, 0.5) == doctest::Approx(13.5));
  CHECK(*cost("cup", at("b", "hall"), 9.0, "kitchen", empty, p, 1.0, 0.5) == doctest::Approx(8.5));
  CHECK_FALSE(cost("cup", at("c", "hall"), std::nullopt, "kitchen", empty, p, 1.0, 0.5).has_value());

  p.transform = ProbabilityTransform::NegLog;
  CHECK(*cost("cup", at("b", "hall"), 9.0, "kitchen", empty, p, 1.0, 0.5) == doctest::Approx(9.0 + std::log(2.0)));
}

TEST_CASE("next location takes the argmin") {
  CostParams p;
  p.k2 = 10;
  SearchAgenda agenda;
  agenda.remaining = {at("a", "kitchen"), at("b", "hall")};
  const std::map<std::string, double> len{{"a", 4.0}, {"b", 9.0}};
  auto path = [&](const SearchLocation& l) -> std::optional<double> { return len.at(l.id); };
  ProbabilityTable table;
  const auto pick = next_location(agenda, "cup", path, "kitchen", table, p, 1.0);
  REQUIRE(pick);
  CHECK(pick->id == "b");
  CHECK(agenda.remaining.size() == 1);
  CHECK(agenda.visited.size() == 1);

  SearchAgenda empty;
  CHECK_FALSE(next_location(empty, "cup", path, "kitchen", table, p, 1.0).has_value());

  SearchAgenda unreachable;
  unreachable.remaining = {at("u", "hall")};
  auto nowhere = [](const SearchLocation&) -> std::optional<double> { return std::nullopt; };
  CHECK_FALSE(next_location(unreachable, "cup", nowhere, "kitchen", table, p, 1.0).has_value());
  CHECK(unreachable.remaining.size() == 1);
}

TEST_CASE("uniform probabilities and no penalty pick the nearest") {
  const auto& w = testutil::lab().world;
  auto agenda = build_agenda_manual(w, testutil::lab().annotations);
  const Pose2 robot{2.0, 2.0, 0};
  CostParams p;
  const auto table = ProbabilityTable({}, 1.0);
  const auto pick = next_location(agenda, "cup", robot, "none", table, p, w);
  REQUIRE(pick);
  const DistanceField field(w, robot.position());
  for (const auto& l : agenda.remaining) CHECK(*field.length_to(l.pose.position()) >= *field.length_to(pick->pose.position()));
}

TEST_CASE("Laplace-smoothed sightings") {
  ProbabilityTable t({"y1", "y2", "y3"}, 1.0);
  const auto uniform = t;
  CHECK(*t.probability("mug", "y1") == doctest::Approx(1.0 / 3));
  const std::vector<SearchLocation> locs{at("y1", "", 0, 0), at("y2", "", 5, 0), at("y3", "", 10, 0)};
  CHECK(update_probabilities(t, {}, locs) == uniform);
  t = update_probabilities(t, {{"mug", {0.2, 0.1}}, {"mug", {-0.3, 0.0}}}, locs);
  CHECK(*t.probability("mug", "y1") == doctest::Approx(0.6));
  CHECK(*t.probability("mug", "y2") == doctest::Approx(0.2));
  CHECK(*t.probability("mug", "y3") == doctest::Approx(0.2));
  CHECK(*t.probability("keys", "y1") == doctest::Approx(1.0 / 3));
  CHECK_FALSE(t.probability("mug", "elsewhere").has_value());
  CHECK(ProbabilityTable::from_json(t.to_json()) == t);
  CHECK_THROWS_AS(t.record("mug", "elsewhere"), InvariantViolation);
}

TEST_CASE("manual agenda") {
  const auto& s = testutil::lab();
  CHECK(build_agenda_manual(s.world, s.annotations).size() == 9);
  CHECK_THROWS_AS(build_agenda_manual(s.world, {{"w", {4.55, 1.0, 0}}}), InvalidAnnotation);
  CHECK_THROWS_AS(build_agenda_manual(s.world, {{"d", {2, 2, 0}}, {"d", {3, 3, 0}}}), InvalidAnnotation);
}

TEST_CASE("generated agenda for one table is a pair") {
  const auto w = testutil::single_room(60, 60, 0.1, {testutil::table("t", rect(3.5, 3.5, 4.7, 4.2))});
  Rng rng(1);
  const auto g = build_agenda_generated(w, "room", w.agent().robot_pose, {}, {}, rng, {});
  CHECK(g.clusters.size() == 1);
  CHECK(g.agenda.size() == 2);
  CHECK(g.scan_seconds == doctest::Approx(108.0));
  for (const auto& l : g.agenda.remaining) CHECK(l.source == LocationSource::Generated);
}

TEST_CASE("generated agenda without surfaces is empty") {
  const auto w = testutil::single_room(60, 60, 0.1, {testutil::table("low", rect(3.5, 3.5, 4.7, 4.2), 0.2)});
  Rng rng(1);
  CHECK(build_agenda_generated(w, "room", w.agent().robot_pose, {}, {}, rng, {}).agenda.size() == 0);
}

TEST_CASE("ten surfaces give at most twenty positions") {
  std::vector<Furniture> f;
  for (int i = 0; i < 10; ++i) {
    const double a = i * 2 * std::numbers::pi / 10;
    const double x = 5 + 3.0 * std::cos(a), y = 5 + 3.0 * std::sin(a);
    f.push_back(testutil::table("t" + std::to_string(i), rect(x - 0.3, y - 0.2, x + 0.3, y + 0.2)));
  }
  const auto w = testutil::single_room(100, 100, 0.1, f);
  Rng rng(2);
  const auto g = build_agenda_generated(w, "room", w.agent().robot_pose, {}, {}, rng, {});
  CHECK(g.agenda.size() <= 20);
  CHECK(g.agenda.size() >= 2);
  CHECK(g.agenda.size() % 2 == 0);
}

TEST_CASE("room center pose is free and inside the room") {
  const auto& w = testutil::lab().world;
  for (const auto& r : w.rooms()) {
    const auto c = room_center_pose(w, r.id);
    REQUIRE(c);
    CHECK_FALSE(w.is_occupied(c->position()));
    CHECK(w.room_of(c->position()) == r.id);
  }
}
