#include "fetchsim/tablegeom.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <unordered_map>

#include "fetchsim/errors.hpp"

namespace fetchsim {

void HeuristicParams::validate() const {
  if (!(band_min < band_max)) throw InvariantViolation("heuristics", "height band needs min < max");
  if (!(band_min > 0) || !(cluster_tolerance > 0) || min_cluster_points <= 0 || !(security_distance >= 0))
    throw InvariantViolation("heuristics", "band, tolerance and cluster size must be positive, d >= 0");
}

PrincipalAxes principal_axes(std::span<const Vec2> points, Vec2 centroid) {
  double a = 0.0, b = 0.0, c = 0.0;
  for (const auto& p : points) {
    const Vec2 d = p - centroid;
    a += d.x * d.x;
    b += d.x * d.y;
    c += d.y * d.y;
  }
  const double n = static_cast<double>(std::max<std::size_t>(points.size(), 1));
  a /= n, b /= n, c /= n;

  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  PrincipalAxes axes;
  axes.first_variance = mean + radius;
  axes.second_variance = mean - radius;

  Vec2 v1{1.0, 0.0};
  const Vec2 u{b, axes.first_variance - a}, w{axes.first_variance - c, b};
  const Vec2 pick = u.norm() >= w.norm() ? u : w;
  if (pick.norm() > 1e-15)
    v1 = (1.0 / pick.norm()) * pick;
  else if (c > a)
    v1 = {0.0, 1.0};

  const bool degenerate = axes.first_variance <= 0.0 || axes.second_variance >= 0.99 * axes.first_variance;
  if (degenerate) {
    const Vec2 v2{-v1.y, v1.x};
    Vec2 second = std::abs(v1.y) > std::abs(v2.y) ? v1 : v2;
    if (second.y < 0 || (second.y == 0 && second.x < 0)) second = -1.0 * second;
    axes.second = second;
    axes.first = {second.y, -second.x};
    if (second == v1) std::swap(axes.first_variance, axes.second_variance);
  } else {
    if (v1.x < 0 || (v1.x == 0 && v1.y < 0)) v1 = -1.0 * v1;
    axes.first = v1;
    axes.second = {-v1.y, v1.x};
  }
  return axes;
}

std::optional<TableCluster> fit_table_cluster(std::vector<LabeledPoint> points) {
  if (points.empty()) return std::nullopt;
  TableCluster t;
  t.points = std::move(points);
  t.footprint.reserve(t.points.size());
  Vec2 sum;
  for (const auto& p : t.points) {
    t.footprint.push_back({p.x, p.y});
    sum = sum + Vec2{p.x, p.y};
  }
  t.centroid = (1.0 / static_cast<double>(t.footprint.size())) * sum;
  const auto axes = principal_axes(t.footprint, t.centroid);
  t.first_axis = axes.first;
  t.second_axis = axes.second;
  for (const auto& p : t.footprint) {
    const Vec2 d = p - t.centroid;
    t.first_extent = std::max(t.first_extent, std::abs(dot(d, t.first_axis)));
    t.second_extent = std::max(t.second_extent, std::abs(dot(d, t.second_axis)));
  }
  if (!(t.first_extent > 1e-9) || !(t.second_extent > 1e-9)) return std::nullopt;
  return t;
}

namespace {

struct CellKey {
  long long x, y;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    return std::hash<long long>()(k.x * 73856093LL ^ k.y * 19349663LL);
  }
};

}  // namespace

std::vector<TableCluster> extract_table_clusters(std::span<const LabeledCloud> clouds, const HeuristicParams& params) {
  std::vector<LabeledPoint> pts;
  for (const auto& cloud : clouds)
    for (const auto& p : cloud.points)
      if (p.label == SemanticLabel::Table && p.z >= params.band_min && p.z <= params.band_max) pts.push_back(p);
  std::sort(pts.begin(), pts.end(), [](const LabeledPoint& a, const LabeledPoint& b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const LabeledPoint& a, const LabeledPoint& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }),
            pts.end());

  const double tol = params.cluster_tolerance;
  auto key = [tol](const LabeledPoint& p) {
    return CellKey{static_cast<long long>(std::floor(p.x / tol)), static_cast<long long>(std::floor(p.y / tol))};
  };
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> buckets;
  for (std::size_t i = 0; i < pts.size(); ++i) buckets[key(pts[i])].push_back(i);

  std::vector<char> assigned(pts.size(), 0);
  std::vector<TableCluster> clusters;
  for (std::size_t seed = 0; seed < pts.size(); ++seed) {
    if (assigned[seed]) continue;
    std::vector<std::size_t> members{seed};
    assigned[seed] = 1;
    for (std::size_t head = 0; head < members.size(); ++head) {
      const auto& p = pts[members[head]];
      const CellKey k = key(p);
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dx = -1; dx <= 1; ++dx) {
          auto it = buckets.find({k.x + dx, k.y + dy});
          if (it == buckets.end()) continue;
          for (auto j : it->second) {
            if (assigned[j]) continue;
            if (std::hypot(pts[j].x - p.x, pts[j].y - p.y) <= tol) {
              assigned[j] = 1;
              members.push_back(j);
            }
          }
        }
    }
    if (static_cast<int>(members.size()) < params.min_cluster_points) continue;
    std::sort(members.begin(), members.end());
    std::vector<LabeledPoint> cp;
    cp.reserve(members.size());
    for (auto m : members) cp.push_back(pts[m]);
    if (auto t = fit_table_cluster(std::move(cp))) clusters.push_back(std::move(*t));
  }
  return clusters;
}

std::string to_string(LocationSource s) { return s == LocationSource::Manual ? "manual" : "generated"; }

std::optional<Vec2> SearchLocation::source_centroid() const {
  if (sources.empty()) return std::nullopt;
  Vec2 sum;
  double weight = 0.0;
  std::vector<const TableCluster*> seen;
  for (const auto& s : sources) {
    if (std::find(seen.begin(), seen.end(), s.cluster.get()) != seen.end()) continue;
    seen.push_back(s.cluster.get());
    const double w = static_cast<double>(s.cluster->footprint.size());
    sum = sum + w * s.cluster->centroid;
    weight += w;
  }
  return (1.0 / weight) * sum;
}

std::vector<SearchLocation> place_search_positions(const std::shared_ptr<const TableCluster>& cluster,
                                                   const HeuristicParams& params, const WorldModel& world,
                                                   const std::string& id_prefix, PlacementAxis axis) {
  const bool second = axis == PlacementAxis::Second;
  const Vec2 dir = second ? cluster->second_axis : cluster->first_axis;
  const double reach = (second ? cluster->second_extent : cluster->first_extent) + params.security_distance;
  const char* names = second ? "ab" : "cd";
  std::vector<SearchLocation> out;
  for (int k = 0; k < 2; ++k) {
    const Vec2 p = cluster->centroid + (k == 0 ? reach : -reach) * dir;
    SearchLocation loc;
    loc.id = id_prefix + names[k];
    loc.pose = {p.x, p.y, heading_to(p, cluster->centroid)};
    loc.room_id = world.room_of(p).value_or("");
    loc.source = LocationSource::Generated;
    loc.sources.push_back({cluster, loc.pose});
    out.push_back(std::move(loc));
  }
  return out;
}

std::vector<SearchLocation> filter_positions(const std::vector<SearchLocation>& candidates,
                                             const std::string& robot_room, const WorldModel& world) {
  std::vector<SearchLocation> out;
  for (const auto& c : candidates) {
    const Vec2 p = c.pose.position();
    if (!world.grid().cell_of(p)) continue;
    if (world.is_occupied(p)) continue;
    if (world.room_of(p) != robot_room) continue;
    const bool sources_here = std::all_of(c.sources.begin(), c.sources.end(), [&](const SourceView& s) {
      return world.room_of(s.cluster->centroid) == robot_room;
    });
    if (!sources_here) continue;
    out.push_back(c);
  }
  return out;
}

GeneratedPositions generate_positions(const std::vector<TableCluster>& clusters, const std::string& robot_room,
                                      const WorldModel& world, const HeuristicParams& params,
                                      const std::string& id_prefix) {
  GeneratedPositions result;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    auto cluster = std::make_shared<const TableCluster>(clusters[k]);
    const std::string prefix = id_prefix + "c" + std::to_string(k);
    auto pair = place_search_positions(cluster, params, world, prefix);
    result.candidates += pair.size();
    auto kept = filter_positions(pair, robot_room, world);
    if (kept.size() == 1) {
      // Typically a surface against a wall: approach from its ends instead.
      kept = filter_positions(place_search_positions(cluster, params, world, prefix, PlacementAxis::First), robot_room,
                              world);
    }
    if (kept.size() == 2) result.positions.insert(result.positions.end(), kept.begin(), kept.end());
  }
  return result;
}

double sector_overlap(const Pose2& a, const Pose2& b, double fov, double range) {
  constexpr int kRadial = 24, kAngular = 24;
  int inside = 0;
  for (int i = 0; i < kRadial; ++i) {
    const double r = range * std::sqrt((i + 0.5) / kRadial);
    for (int j = 0; j < kAngular; ++j) {
      const double t = a.yaw - 0.5 * fov + fov * (j + 0.5) / kAngular;
      if (in_view(b, {a.x + r * std::cos(t), a.y + r * std::sin(t)}, fov, range)) ++inside;
    }
  }
  return static_cast<double>(inside) / (kRadial * kAngular);
}

namespace {

bool sees_what_originals_saw(const Pose2& merged, const std::vector<SourceView>& sources, double fov, double range) {
  for (const auto& s : sources)
    for (const auto& p : s.cluster->footprint)
      if (in_view(s.origin, p, fov, range) && !in_view(merged, p, fov, range)) return false;
  return true;
}

std::optional<SearchLocation> try_merge(const SearchLocation& a, const SearchLocation& b, const WorldModel& world,
                                        double fov, double range, double min_overlap) {
  if (a.room_id != b.room_id) return std::nullopt;
  if (distance(a.pose.position(), b.pose.position()) > 2.0 * range) return std::nullopt;
  if (std::min(sector_overlap(a.pose, b.pose, fov, range), sector_overlap(b.pose, a.pose, fov, range)) < min_overlap)
    return std::nullopt;

  SearchLocation m;
  m.id = a.id + "+" + b.id;
  m.room_id = a.room_id;
  m.source = LocationSource::Generated;
  m.sources = a.sources;
  m.sources.insert(m.sources.end(), b.sources.begin(), b.sources.end());
  const Vec2 mid = 0.5 * (a.pose.position() + b.pose.position());
  if (world.is_occupied(mid) || world.room_of(mid).value_or("") != m.room_id) return std::nullopt;
  const auto target = m.source_centroid();
  m.pose = {mid.x, mid.y, target ? heading_to(mid, *target) : a.pose.yaw};
  if (!sees_what_originals_saw(m.pose, m.sources, fov, range)) return std::nullopt;
  return m;
}

}  // namespace

std::vector<SearchLocation> cluster_positions(const std::vector<SearchLocation>& locations, const WorldModel& world,
                                              double fov, double range, double min_overlap) {
  std::vector<SearchLocation> out = locations;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size();) {
      if (auto m = try_merge(out[i], out[j], world, fov, range, min_overlap)) {
        out[i] = std::move(*m);
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
        j = i + 1;
      } else {
        ++j;
      }
    }
  }
  return out;
}

void write_clusters_csv(std::ostream& out, const std::vector<TableCluster>& clusters) {
  out << "cluster,centroid_x,centroid_y,first_x,first_y,second_x,second_y,first_extent,second_extent,points\n";
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const auto& c = clusters[k];
    out << k << ',' << c.centroid.x << ',' << c.centroid.y << ',' << c.first_axis.x << ',' << c.first_axis.y << ','
        << c.second_axis.x << ',' << c.second_axis.y << ',' << c.first_extent << ',' << c.second_extent << ','
        << c.points.size() << '\n';
  }
}

void write_positions_csv(std::ostream& out, const std::vector<SearchLocation>& locations) {
  out << "id,x,y,yaw,room,source,target_x,target_y\n";
  for (const auto& l : locations) {
    out << l.id << ',' << l.pose.x << ',' << l.pose.y << ',' << l.pose.yaw << ',' << l.room_id << ','
        << to_string(l.source);
    if (auto c = l.source_centroid())
      out << ',' << c->x << ',' << c->y;
    else
      out << ",,";
    out << '\n';
  }
}

}  // namespace fetchsim
