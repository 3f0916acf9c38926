#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef FETCHSIM_HAVE_EIGEN
#include <Eigen/Eigenvalues>
#endif

#include "fetchsim/rng.hpp"
#include "fetchsim/tablegeom.hpp"
#include "helpers.hpp"

using namespace fetchsim;
using testutil::rect;

namespace {

std::vector<LabeledPoint> sample_rect(double cx, double cy, double w, double h, double angle, double step,
                                      double z = 0.75) {
  std::vector<LabeledPoint> out;
  const double c = std::cos(angle), s = std::sin(angle);
  for (double u = -w / 2; u <= w / 2 + 1e-9; u += step)
    for (double v = -h / 2; v <= h / 2 + 1e-9; v += step)
      out.push_back({cx + c * u - s * v, cy + s * u + c * v, z, SemanticLabel::Table});
  return out;
}

LabeledCloud cloud_of(std::vector<LabeledPoint> pts) { return LabeledCloud{std::move(pts), {}}; }

}  // namespace

TEST_CASE("no table points, no clusters") {
  LabeledCloud c;
  c.points = {{1, 1, 0, SemanticLabel::Floor}, {1, 2, 1.5, SemanticLabel::Wall}};
  CHECK(extract_table_clusters(std::vector{c}, {}).empty());
}

TEST_CASE("uniform 2 x 1 table") {
  for (double angle : {0.0, 0.4, 1.2, -0.7}) {
    const auto clusters = extract_table_clusters(std::vector{cloud_of(sample_rect(3, 2, 2.0, 1.0, angle, 0.05))}, {});
    REQUIRE(clusters.size() == 1);
    const auto& t = clusters.front();
    const double along = std::abs(cross(t.first_axis, {std::cos(angle), std::sin(angle)}));
    CHECK(along < std::sin(2.0 * std::numbers::pi / 180));
    CHECK(t.first_extent == doctest::Approx(1.0).epsilon(0.05));
    CHECK(t.second_extent == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("two tables 3 m apart") {
  auto pts = sample_rect(1, 1, 1.0, 0.6, 0, 0.05);
  auto more = sample_rect(5, 1, 1.0, 0.6, 0, 0.05);
  pts.insert(pts.end(), more.begin(), more.end());
  HeuristicParams p;
  p.cluster_tolerance = 0.2;
  CHECK(extract_table_clusters(std::vector{cloud_of(pts)}, p).size() == 2);
}

TEST_CASE("clusters match brute-force single linkage") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabeledPoint> pts;
    const int blobs = 1 + static_cast<int>(rng.below(4));
    for (int b = 0; b < blobs; ++b) {
      const double cx = rng.uniform(0, 6), cy = rng.uniform(0, 6);
      const int n = 5 + static_cast<int>(rng.below(60));
      for (int i = 0; i < n; ++i)
        pts.push_back({std::round((cx + rng.uniform(-0.6, 0.6)) * 100) / 100,
                       std::round((cy + rng.uniform(-0.6, 0.6)) * 100) / 100, 0.8, SemanticLabel::Table});
    }
    HeuristicParams p;
    p.cluster_tolerance = 0.15;
    p.min_cluster_points = 10;

    // Oracle: dedupe, union-find over all pairs.
    auto uniq = pts;
    std::sort(uniq.begin(), uniq.end(), [](auto& a, auto& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    uniq.erase(std::unique(uniq.begin(), uniq.end(), [](auto& a, auto& b) { return a.x == b.x && a.y == b.y; }),
               uniq.end());
    std::vector<std::size_t> parent(uniq.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (std::size_t i = 0; i < uniq.size(); ++i)
      for (std::size_t j = i + 1; j < uniq.size(); ++j)
        if (std::hypot(uniq[i].x - uniq[j].x, uniq[i].y - uniq[j].y) <= p.cluster_tolerance) parent[find(i)] = find(j);
    std::map<std::size_t, std::vector<std::pair<double, double>>> groups;
    for (std::size_t i = 0; i < uniq.size(); ++i) groups[find(i)].push_back({uniq[i].x, uniq[i].y});
    std::vector<std::vector<std::pair<double, double>>> expected;
    for (auto& [_, g] : groups)
      if (static_cast<int>(g.size()) >= p.min_cluster_points) {
        std::sort(g.begin(), g.end());
        expected.push_back(g);
      }
    std::sort(expected.begin(), expected.end());

    std::vector<std::vector<std::pair<double, double>>> got;
    for (const auto& c : extract_table_clusters(std::vector{cloud_of(pts)}, p)) {
      std::vector<std::pair<double, double>> g;
      for (const auto& q : c.points) g.push_back({q.x, q.y});
      std::sort(g.begin(), g.end());
      got.push_back(g);
    }
    std::sort(got.begin(), got.end());
    // Collinear clusters have a zero extent and are dropped by the fit.
    CHECK(got.size() <= expected.size());
    for (const auto& g : got) CHECK(std::find(expected.begin(), expected.end(), g) != expected.end());
  }
}

TEST_CASE("points outside the height band are ignored") {
  const auto high = sample_rect(1, 1, 1, 1, 0, 0.05, 1.6);
  const auto low = sample_rect(4, 1, 1, 1, 0, 0.05, 0.2);
  CHECK(extract_table_clusters(std::vector{cloud_of(high), cloud_of(low)}, {}).empty());
}

#ifdef FETCHSIM_HAVE_EIGEN
TEST_CASE("principal axes agree with a covariance eigen-solver") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Vec2> pts;
    const int n = 3 + static_cast<int>(rng.below(200));
    const double sx = rng.uniform(0.1, 2), sy = rng.uniform(0.1, 2), a = rng.uniform(-3, 3);
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform(-sx, sx), v = rng.uniform(-sy, sy);
      pts.push_back({std::cos(a) * u - std::sin(a) * v, std::sin(a) * u + std::cos(a) * v});
    }
    Vec2 c;
    for (auto p : pts) c = c + p;
    c = (1.0 / n) * c;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (auto p : pts) {
      Eigen::Vector2d d(p.x - c.x, p.y - c.y);
      cov += d * d.transpose();
    }
    cov /= n;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const auto axes = principal_axes(pts, c);
    CHECK(axes.first_variance == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-9));
    CHECK(axes.second_variance == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-9));
    if (es.eigenvalues()(0) < 0.99 * es.eigenvalues()(1)) {
      const Eigen::Vector2d e1 = es.eigenvectors().col(1);
      CHECK(std::abs(cross(axes.first, {e1(0), e1(1)})) < 1e-6);
    }
    CHECK(dot(axes.first, axes.second) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cross(axes.first, axes.second) == doctest::Approx(1.0));
  }
}
#endif

TEST_CASE("placement on the second axis") {
  const auto w = testutil::single_room(60, 50, 0.1);
  auto t = std::make_shared<TableCluster>();
  t->centroid = {3, 2};
  t->first_axis = {1, 0};
  t->second_axis = {0, 1};
  t->first_extent = 1.0;
  t->second_extent = 0.5;
  const auto poses = place_search_positions(t, {}, w, "t");
  REQUIRE(poses.size() == 2);
  CHECK(poses[0].pose.x == doctest::Approx(3.0));
  CHECK(poses[0].pose.y == doctest::Approx(2.9));
  CHECK(poses[0].pose.yaw == doctest::Approx(-std::numbers::pi / 2));
  CHECK(poses[1].pose.y == doctest::Approx(1.1));
  CHECK(poses[1].pose.yaw == doctest::Approx(std::numbers::pi / 2));

  HeuristicParams zero;
  zero.security_distance = 0.0;
  const auto edge = place_search_positions(t, zero, w, "t");
  CHECK(edge[0].pose.y == doctest::Approx(2.5));
  CHECK(edge[1].pose.y == doctest::Approx(1.5));
}

TEST_CASE("square table uses the tie-broken axis") {
  const auto fit = fit_table_cluster(sample_rect(2, 2, 1.0, 1.0, 0, 0.05));
  REQUIRE(fit);
  CHECK(fit->second_axis.x == doctest::Approx(0.0));
  CHECK(fit->second_axis.y == doctest::Approx(1.0));
  CHECK(fit->first_axis.x == doctest::Approx(1.0));
}

TEST_CASE("poses lie on the second axis at extent + d") {
  Rng rng(55);
  const auto w = testutil::single_room(100, 100, 0.1);
  for (int i = 0; i < 200; ++i) {
    const auto fit = fit_table_cluster(sample_rect(rng.uniform(3, 7), rng.uniform(3, 7), rng.uniform(0.4, 2),
                                                   rng.uniform(0.4, 2), rng.uniform(-3, 3), 0.05));
    REQUIRE(fit);
    auto t = std::make_shared<TableCluster>(*fit);
    for (const auto& loc : place_search_positions(t, {}, w, "x")) {
      const Vec2 d = loc.pose.position() - t->centroid;
      CHECK(std::abs(cross(d, t->second_axis)) < 1e-6);
      CHECK(d.norm() == doctest::Approx(t->second_extent + 0.4));
    }
  }
}

TEST_CASE("filters") {
  const auto& w = testutil::lab().world;
  auto t = std::make_shared<TableCluster>();
  t->centroid = {1.2, 2.5};
  t->first_axis = {0, 1};
  t->second_axis = {-1, 0};
  t->first_extent = 0.7;
  t->second_extent = 0.6;

  SearchLocation wall_pose;
  wall_pose.id = "w";
  wall_pose.pose = {4.55, 2.5, 0};
  wall_pose.sources.push_back({t, wall_pose.pose});
  CHECK(filter_positions({wall_pose}, "dining_room", w).empty());

  // Seen through the doorway from the hall: both poses go.
  const auto poses = place_search_positions(t, {}, w, "d");
  CHECK(filter_positions(poses, "central_hall", w).empty());
  CHECK(filter_positions(poses, "dining_room", w).size() == 2);
}

TEST_CASE("filters agree with an independent re-implementation") {
  const auto& w = testutil::lab().world;
  Rng rng(99);
  std::vector<SearchLocation> cands;
  for (int i = 0; i < 500; ++i) {
    auto t = std::make_shared<TableCluster>();
    t->centroid = {rng.uniform(-1, 13), rng.uniform(-1, 10)};
    SearchLocation loc;
    loc.id = std::to_string(i);
    loc.pose = {rng.uniform(-1, 13), rng.uniform(-1, 10), 0};
    loc.sources.push_back({t, loc.pose});
    cands.push_back(loc);
  }
  for (const auto& room : w.rooms()) {
    const auto kept = filter_positions(cands, room.id, w);
    std::vector<std::string> expected;
    const auto& g = w.grid();
    for (const auto& c : cands) {
      const double x = c.pose.x, y = c.pose.y;
      if (x < 0 || y < 0 || x >= g.width_m() || y >= g.height_m()) continue;
      const int col = static_cast<int>(x / g.resolution()), row = static_cast<int>(y / g.resolution());
      if (g.at(col, row) != Cell::Free) continue;
      if (!contains(room.polygon, {x, y})) continue;
      if (!contains(room.polygon, c.sources[0].cluster->centroid)) continue;
      expected.push_back(c.id);
    }
    std::vector<std::string> got;
    for (const auto& k : kept) got.push_back(k.id);
    CHECK(got == expected);
  }
}

TEST_CASE("position merging") {
  const auto& w = testutil::lab().world;
  const double fov = w.agent().camera.fov_horizontal;
  auto t = std::make_shared<TableCluster>(*fit_table_cluster(sample_rect(1.2, 2.5, 1.0, 1.2, 0, 0.1)));
  SearchLocation a;
  a.id = "a";
  a.pose = {2.4, 2.5, std::numbers::pi};
  a.room_id = "dining_room";
  a.source = LocationSource::Generated;
  a.sources.push_back({t, a.pose});
  auto b = a;
  b.id = "b";
  CHECK(cluster_positions({a, b}, w, fov, 2.0, 0.5).size() == 1);

  auto far = a;
  far.id = "far";
  far.pose = {8.4, 2.5, 0};
  CHECK(cluster_positions({a, far}, w, fov, 2.0, 0.5).size() == 2);
  CHECK(sector_overlap(a.pose, a.pose, fov, 2.0) == doctest::Approx(1.0));
  CHECK(sector_overlap(a.pose, far.pose, fov, 2.0) == 0.0);
}

TEST_CASE("dense overlay merges and keeps coverage") {
  const auto& s = testutil::lab();
  const auto& w = s.world;
  const auto& cam = w.agent().camera;
  Rng rng(12);
  std::vector<SearchLocation> all;
  for (int k = 0; k < 12; ++k) {
    const Pose2 center{rng.uniform(0.8, 3.8), rng.uniform(5.3, 8.0), 0};
    if (w.is_occupied(center.position())) continue;
    auto gen = scan_positions(w, "kitchen", center, s.heuristics, {}, rng, "k" + std::to_string(k) + ":");
    all.insert(all.end(), gen.positions.begin(), gen.positions.end());
  }
  REQUIRE(all.size() > 4);
  const auto merged = cluster_positions(all, w, cam.fov_horizontal, cam.recognition_range, 0.5);
  CHECK(merged.size() < all.size());
  // Every point an original pose saw is still seen by the pose it merged into.
  for (const auto& m : merged)
    for (const auto& src : m.sources)
      for (const auto& p : src.cluster->footprint)
        if (in_view(src.origin, p, cam.fov_horizontal, cam.recognition_range))
          CHECK(in_view(m.pose, p, cam.fov_horizontal, cam.recognition_range));
}
