#include <doctest.h>

#include <numbers>

#include "fetchsim/geometry.hpp"
#include "fetchsim/rng.hpp"

using namespace fetchsim;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  constexpr double pi = std::numbers::pi;
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double a = wrap_angle(rng.uniform(-50, 50));
    CHECK(a > -pi);
    CHECK(a <= pi);
  }
}

TEST_CASE("closed polygon containment") {
  const Polygon sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(contains(sq, {1, 1}));
  CHECK(contains(sq, {2, 1}));
  CHECK(contains(sq, {0, 0}));
  CHECK_FALSE(contains(sq, {2.1, 1}));
  CHECK_FALSE(inside_even_odd({2, 1}, sq));
  CHECK(polygon_signed_area(sq) == doctest::Approx(4.0));
  const Vec2 c = polygon_centroid(sq);
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(1.0));
}

TEST_CASE("simple polygons and segment crossings") {
  CHECK(is_simple(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  CHECK_FALSE(is_simple(Polygon{{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
  CHECK(segments_cross({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  CHECK_FALSE(segments_cross({0, 0}, {1, 1}, {1, 1}, {2, 0}));
  CHECK(segments_intersect({0, 0}, {1, 1}, {1, 1}, {2, 0}));
  CHECK(distance_to_segment({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
}

TEST_CASE("box overlap uses the open interior") {
  const Polygon tri{{0, 0}, {1, 0}, {0, 1}};
  CHECK(box_overlaps_polygon({0.1, 0.1}, {0.2, 0.2}, tri));
  CHECK_FALSE(box_overlaps_polygon({1, 0}, {2, 1}, tri));
  CHECK_FALSE(box_overlaps_polygon({0.6, 0.6}, {0.9, 0.9}, tri));
}
