#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace fetchsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2, Vec2) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2&, const Pose2&) = default;
};

using Polygon = std::vector<Vec2>;

/// Boundary tolerance for polygon tests, metres.
inline constexpr double kBoundaryEpsilon = 1e-9;

/// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

inline double heading_to(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

double polygon_signed_area(std::span<const Vec2> poly);
/// Area centroid; falls back to the vertex mean for degenerate polygons.
Vec2 polygon_centroid(std::span<const Vec2> poly);

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);
bool on_boundary(Vec2 p, std::span<const Vec2> poly, double eps = kBoundaryEpsilon);
/// Even-odd ray cast, strict interior.
bool inside_even_odd(Vec2 p, std::span<const Vec2> poly);
/// Closed containment: interior or within `eps` of an edge.
bool contains(std::span<const Vec2> poly, Vec2 p, double eps = kBoundaryEpsilon);

/// Proper or touching intersection of closed segments.
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
/// Interior crossing only: shared endpoints and collinear touching do not count.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
bool is_simple(std::span<const Vec2> poly);

/// True when the open axis-aligned box intersects the polygon's interior.
bool box_overlaps_polygon(Vec2 lo, Vec2 hi, std::span<const Vec2> poly);

}  // namespace fetchsim
