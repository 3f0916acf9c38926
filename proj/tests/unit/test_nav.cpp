#include <doctest.h>

#include <cmath>
#include <limits>
#include <queue>

#include "fetchsim/errors.hpp"
#include "fetchsim/nav.hpp"
#include "fetchsim/rng.hpp"
#include "helpers.hpp"

using namespace fetchsim;

namespace {

WorldModel grid_world(OccupancyGrid grid, Vec2 robot) {
  const double W = grid.width_m(), H = grid.height_m();
  std::vector<Room> rooms{{"r", "", testutil::rect(0, 0, W, H)}};
  AgentState agent;
  agent.robot_pose = {robot.x, robot.y, 0};
  agent.user_room_last_seen = "r";
  return WorldModel::build(std::move(grid), rooms, {}, {}, agent);
}

// Bellman-Ford style relaxation until nothing changes; independent of the
// priority-queue implementation.
std::vector<double> oracle_distances(const OccupancyGrid& g, CellIndex s) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(static_cast<std::size_t>(g.width()) * g.height(), inf);
  d[g.index(s.col, s.row)] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < g.height(); ++r)
      for (int c = 0; c < g.width(); ++c) {
        if (g.at(c, r) != Cell::Free) continue;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (!dr && !dc) continue;
            const int nc = c + dc, nr = r + dr;
            if (!g.is_free({nc, nr})) continue;
            if (dr && dc && (!g.is_free({c + dc, r}) || !g.is_free({c, r + dr}))) continue;
            const double step = (dr && dc) ? g.resolution() * std::sqrt(2.0) : g.resolution();
            const double cand = d[g.index(nc, nr)] + step;
            if (cand < d[g.index(c, r)] - 1e-12) {
              d[g.index(c, r)] = cand;
              changed = true;
            }
          }
      }
  }
  return d;
}

}  // namespace

TEST_CASE("plan: start equals goal") {
  const auto w = grid_world(testutil::open_grid(10, 10, 1.0), {0.5, 0.5});
  const auto p = plan({0.5, 0.5}, {0.5, 0.5}, w);
  REQUIRE(p);
  CHECK(p->length == 0.0);
  CHECK(p->waypoints.size() == 1);
}

TEST_CASE("plan: diagonal then straight") {
  const auto w = grid_world(testutil::open_grid(10, 10, 1.0), {0.5, 0.5});
  const auto p = plan({0.5, 0.5}, {3.5, 4.5}, w);
  REQUIRE(p);
  CHECK(p->length == doctest::Approx(3 * std::sqrt(2.0) + 1));
  CHECK(p->waypoints.size() == 5);
}

TEST_CASE("plan: enclosed goal is unreachable") {
  auto g = testutil::open_grid(10, 10, 1.0);
  for (int c = 4; c <= 6; ++c)
    for (int r = 4; r <= 6; ++r)
      if (c != 5 || r != 5) g.set(c, r, Cell::Occupied);
  const auto w = grid_world(g, {0.5, 0.5});
  CHECK_FALSE(plan({0.5, 0.5}, {5.5, 5.5}, w).has_value());
  CHECK_FALSE(plan({0.5, 0.5}, {4.5, 4.5}, w).has_value());
  CHECK_THROWS_AS(DistanceField(w, {4.5, 4.5}), StartOccupied);
}

TEST_CASE("plan agrees with a relaxation oracle on random grids") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int w = 4 + static_cast<int>(rng.below(9)), h = 4 + static_cast<int>(rng.below(9));
    auto g = testutil::open_grid(w, h, 0.5);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        if (rng.bernoulli(0.3)) g.set(c, r, Cell::Occupied);
    g.set(0, 0, Cell::Free);
    const auto world = grid_world(g, {0.25, 0.25});
    const auto d = oracle_distances(world.grid(), {0, 0});
    const DistanceField field(world, {0.25, 0.25});
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const Vec2 goal = world.grid().center_of({c, r});
        const auto len = field.length_to(goal);
        const double expect = d[world.grid().index(c, r)];
        if (std::isinf(expect)) {
          CHECK_FALSE(len.has_value());
          continue;
        }
        REQUIRE(len.has_value());
        CHECK(*len == doctest::Approx(expect).epsilon(1e-9));
        const auto path = field.path_to(goal);
        REQUIRE(path);
        double sum = 0;
        for (std::size_t i = 1; i < path->waypoints.size(); ++i) {
          const Vec2 a = path->waypoints[i - 1], b = path->waypoints[i];
          const double step = distance(a, b);
          CHECK(step <= 0.5 * std::sqrt(2.0) + 1e-9);
          CHECK_FALSE(world.is_occupied(b));
          sum += step;
        }
        CHECK(sum == doctest::Approx(path->length));
      }
  }
}

TEST_CASE("travel time") {
  DurationModel m;
  m.translate_speed = 0.5;
  m.rotate_speed = std::numbers::pi / 4;
  CHECK(travel_time(Path{}, 0.0, m) == 0.0);
  Path five;
  five.length = 5.0;
  CHECK(travel_time(five, std::numbers::pi, m) == doctest::Approx(14.0));
  Path six;
  six.length = 6.0;
  CHECK(travel_time(six, 0.0, m) > travel_time(five, 0.0, m));
}

TEST_CASE("path turns") {
  Path p;
  p.waypoints = {{0, 0}, {1, 0}, {1, 1}};
  CHECK(path_turns(p, 0.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(path_turns(p, 0.0, std::numbers::pi) == doctest::Approx(std::numbers::pi));
}

namespace {

// Two-stage pipeline: rotations run back to back on the base, each
// segmentation starts once its view is captured and the previous
// segmentation is done.
double pipeline_oracle(int steps, double rot, double seg, bool overlap) {
  double base = 0, segmenter = 0;
  for (int k = 0; k < steps; ++k) {
    if (!overlap) {
      base += rot + seg;
      continue;
    }
    base += rot;
    segmenter = std::max(segmenter, base) + seg;
  }
  return overlap ? std::max(base, segmenter) : base;
}

}  // namespace

TEST_CASE("scan duration matches a discrete-event pipeline") {
  DurationModel m;
  CHECK(scan_duration(12, m, false) == doctest::Approx(108.0));
  CHECK(scan_duration(12, m, true) == doctest::Approx(64.0));
  CHECK(scan_duration(1, m, true) == doctest::Approx(scan_duration(1, m, false)));
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    DurationModel d;
    d.rotate_step_time = rng.uniform(0.5, 10);
    d.segmentation_time = rng.uniform(0.5, 10);
    const int steps = 1 + static_cast<int>(rng.below(24));
    for (bool overlap : {false, true})
      CHECK(scan_duration(steps, d, overlap) ==
            doctest::Approx(pipeline_oracle(steps, d.rotate_step_time, d.segmentation_time, overlap)));
  }
  CHECK_THROWS_AS(scan_duration(0, m, false), std::invalid_argument);
}
