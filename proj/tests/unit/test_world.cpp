#include <doctest.h>

#include "fetchsim/errors.hpp"
#include "fetchsim/rng.hpp"
#include "helpers.hpp"

using namespace fetchsim;
using testutil::rect;

namespace {

// Plain even-odd crossing count with boundary points counted as inside.
bool oracle_inside(const Polygon& poly, Vec2 p) {
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (distance_to_segment(p, poly[i], poly[(i + 1) % poly.size()]) <= 1e-9) return true;
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

}  // namespace

TEST_CASE("minimal world") {
  std::vector<Room> rooms{{"only", "", rect(0, 0, 1, 1)}};
  AgentState agent;
  agent.robot_pose = {0.55, 0.55, 0};
  agent.user_room_last_seen = "only";
  const auto w = WorldModel::build(testutil::open_grid(10, 10, 0.1), rooms, {}, {}, agent);
  CHECK(w.rooms().size() == 1);
  CHECK(w.rooms()[0].label == "only");
  CHECK(w.agent().user_room_actual == "only");
}

TEST_CASE("object off its supporting footprint is rejected") {
  auto f = testutil::table("t", rect(1, 1, 2, 2));
  SceneObject inside{"cup", "cup", {1.5, 1.5, 0.75, 0}, "t"};
  SceneObject outside{"cup", "cup", {2.5, 1.5, 0.75, 0}, "t"};
  CHECK_NOTHROW(testutil::single_room(50, 50, 0.1, {f}, {inside}));
  CHECK_THROWS_AS(testutil::single_room(50, 50, 0.1, {f}, {outside}), InvariantViolation);
  SceneObject floating{"cup", "cup", {1.5, 1.5, 0.9, 0}, "t"};
  CHECK_THROWS_AS(testutil::single_room(50, 50, 0.1, {f}, {floating}), InvariantViolation);
}

TEST_CASE("robot must start on a free cell") {
  CHECK_THROWS_AS(testutil::single_room(20, 20, 0.1, {}, {}, {0.05, 0.05, 0}), InvariantViolation);
}

TEST_CASE("bundled lab has a table-class surface in every room") {
  const auto& w = testutil::lab().world;
  CHECK(w.rooms().size() == 5);
  for (const auto& r : w.rooms()) {
    bool has_table = false;
    for (const auto& f : w.furniture())
      has_table |= f.room_id == r.id && f.cls == FurnitureClass::Table;
    CHECK_MESSAGE(has_table, r.id);
  }
  CHECK(testutil::lab().annotations.size() == 9);
}

TEST_CASE("room_of") {
  const auto& w = testutil::lab().world;
  for (const auto& r : w.rooms()) {
    const Vec2 c = polygon_centroid(r.polygon);
    CHECK(w.room_of(c) == r.id);
  }
  CHECK_FALSE(w.room_of({4.55, 1.0}).has_value());  // inside the wall between dining room and hall
  CHECK(w.is_occupied({4.55, 1.0}));

  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p{rng.uniform(-0.5, 12.5), rng.uniform(-0.5, 9.5)};
    std::optional<std::string> expected;
    for (const auto& r : w.rooms())
      if (oracle_inside(r.polygon, p)) {
        expected = r.id;
        break;
      }
    CHECK(w.room_of(p) == expected);
  }
}

TEST_CASE("is_occupied") {
  const auto f = testutil::table("t", rect(1.0, 1.0, 1.6, 1.35));
  const auto w = testutil::single_room(30, 30, 0.1, {f});
  CHECK_FALSE(w.is_occupied({2.25, 2.25}));
  CHECK(w.is_occupied({-0.1, 1.0}));
  CHECK(w.is_occupied({1.0, 3.5}));
  CHECK(w.is_occupied({1.3, 1.2}));

  // A cell is occupied by furniture iff the footprint covers part of its open interior.
  const auto& g = w.grid();
  for (int r = 1; r < g.height() - 1; ++r) {
    for (int c = 1; c < g.width() - 1; ++c) {
      const double x0 = c * 0.1, y0 = r * 0.1;
      bool covered = false;
      for (int i = 1; i < 10 && !covered; ++i)
        for (int j = 1; j < 10 && !covered; ++j)
          covered = inside_even_odd({x0 + i * 0.01, y0 + j * 0.01}, f.footprint);
      CHECK(((g.at(c, r) == Cell::Occupied) == covered));
    }
  }
}

TEST_CASE("scenario JSON round trip") {
  const auto& s = testutil::lab();
  const auto again = load_scenario(scenario_to_json(s));
  CHECK(scenario_to_json(again) == scenario_to_json(s));
  CHECK(again.world.grid().cells() == s.world.grid().cells());
}

TEST_CASE("schema errors carry a path") {
  auto doc = scenario_to_json(testutil::lab());
  doc["grid"]["resolution"] = "fine";
  try {
    load_scenario(doc);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path() == "grid.resolution");
  }
}
