#include "fetchsim/geometry.hpp"

#include <algorithm>

namespace fetchsim {

double polygon_signed_area(std::span<const Vec2> poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

Vec2 polygon_centroid(std::span<const Vec2> poly) {
  if (poly.empty()) return {};
  const double area = polygon_signed_area(poly);
  if (std::abs(area) < 1e-12) {
    Vec2 m;
    for (const auto& p : poly) m = m + p;
    return (1.0 / static_cast<double>(poly.size())) * m;
  }
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const double w = cross(a, b);
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (6.0 * area), cy / (6.0 * area)};
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

bool on_boundary(Vec2 p, std::span<const Vec2> poly, double eps) {
  for (std::size_t i = 0, n = poly.size(); i < n; ++i)
    if (distance_to_segment(p, poly[i], poly[(i + 1) % n]) <= eps) return true;
  return false;
}

bool inside_even_odd(Vec2 p, std::span<const Vec2> poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

bool contains(std::span<const Vec2> poly, Vec2 p, double eps) {
  if (poly.size() < 3) return false;
  return on_boundary(p, poly, eps) || inside_even_odd(p, poly);
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (std::abs(v) < 1e-12) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

bool is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  if (std::abs(polygon_signed_area(poly)) < 1e-12) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool box_overlaps_polygon(Vec2 lo, Vec2 hi, std::span<const Vec2> poly) {
  const Vec2 corners[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
  const Vec2 centre = 0.5 * (lo + hi);
  if (inside_even_odd(centre, poly) && !on_boundary(centre, poly, 1e-12)) return true;
  for (const auto& c : corners)
    if (inside_even_odd(c, poly) && !on_boundary(c, poly, 1e-12)) return true;
  for (const auto& v : poly)
    if (v.x > lo.x && v.x < hi.x && v.y > lo.y && v.y < hi.y) return true;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    for (int k = 0; k < 4; ++k)
      if (segments_cross(a, b, corners[k], corners[(k + 1) % 4])) return true;
  }
  return false;
}

}  // namespace fetchsim
