#include "fetchsim/percept.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fetchsim/errors.hpp"

namespace fetchsim {

std::string to_string(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::Floor: return "floor";
    case SemanticLabel::Wall: return "wall";
    case SemanticLabel::Ceiling: return "ceiling";
    case SemanticLabel::Table: return "table";
    case SemanticLabel::Chair: return "chair";
    case SemanticLabel::Cabinet: return "cabinet";
    case SemanticLabel::Object: return "object";
    case SemanticLabel::Unknown: return "unknown";
  }
  return "unknown";
}

void PerceptionNoise::validate() const {
  for (double p : {label_flip_rate, dropout_rate, p_true_positive, p_false_positive, p_user_detection})
    if (!(p >= 0.0 && p <= 1.0)) throw InvariantViolation("noise", "probabilities must lie in [0, 1]");
}

SemanticLabel label_for(FurnitureClass cls, double h, const SenseOptions& o) {
  const bool graspable = h >= o.graspable_min && h <= o.graspable_max;
  switch (cls) {
    case FurnitureClass::Table: return SemanticLabel::Table;
    case FurnitureClass::Shelf:
    case FurnitureClass::Windowsill:
    case FurnitureClass::Nightstand: return graspable ? SemanticLabel::Table : SemanticLabel::Cabinet;
    case FurnitureClass::Cabinet: return SemanticLabel::Cabinet;
    case FurnitureClass::Other: return SemanticLabel::Unknown;
  }
  return SemanticLabel::Unknown;
}

bool in_view(const Pose2& pose, Vec2 p, double fov, double range) {
  const Vec2 d = p - pose.position();
  const double r = d.norm();
  if (r > range) return false;
  if (r < 1e-12 || fov >= 2.0 * std::numbers::pi) return true;
  return std::abs(wrap_angle(std::atan2(d.y, d.x) - pose.yaw)) <= 0.5 * fov + 1e-12;
}

std::vector<std::size_t> visible_cells(const WorldModel& world, const Pose2& pose, double fov, double range) {
  const auto& grid = world.grid();
  const double res = grid.resolution();
  std::vector<char> seen(grid.cells().size(), 0);
  const auto origin = grid.cell_of(pose.position());
  if (!origin) return {};
  seen[grid.index(origin->col, origin->row)] = 1;

  const double full = std::min(fov, 2.0 * std::numbers::pi);
  const double dtheta = 0.5 * res / range;
  const int rays = std::max(2, static_cast<int>(std::ceil(full / dtheta)) + 1);
  const double march = 0.25 * res;
  for (int k = 0; k < rays; ++k) {
    const double a = pose.yaw - 0.5 * full + full * k / (rays - 1);
    const Vec2 dir{std::cos(a), std::sin(a)};
    int last = static_cast<int>(grid.index(origin->col, origin->row));
    bool in_furniture = false;
    for (double t = march; t <= range; t += march) {
      const auto c = grid.cell_of(pose.position() + t * dir);
      if (!c) break;
      const int idx = static_cast<int>(grid.index(c->col, c->row));
      if (idx == last) continue;
      last = idx;
      const Cell v = grid.at(*c);
      if (v == Cell::Free) {
        if (in_furniture) break;  // occluded behind a footprint
        seen[idx] = 1;
        continue;
      }
      seen[idx] = 1;
      if (v == Cell::Occupied && world.furniture_at(*c) >= 0) {
        in_furniture = true;
        continue;
      }
      break;  // wall or unknown
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

LabeledCloud sense_semantic(const WorldModel& world, const Pose2& sensor, const PerceptionNoise& noise, Rng& rng,
                            const SenseOptions& options) {
  if (world.is_occupied(sensor.position()))
    throw SensorPoseOccupied("sensor pose (" + std::to_string(sensor.x) + ", " + std::to_string(sensor.y) +
                             ") is not on a Free cell");
  const auto& cam = world.agent().camera;
  const auto& grid = world.grid();
  const double res = grid.resolution();
  const double s = options.sample_spacing;

  LabeledCloud cloud;
  cloud.sensor = {sensor.x, sensor.y, sensor.yaw, cam.mount_height};
  const auto cells = visible_cells(world, sensor, cam.fov_horizontal, cam.max_range);
  std::vector<char> visible(grid.cells().size(), 0);
  for (auto i : cells) visible[i] = 1;

  auto emit = [&](LabeledPoint p) {
    if (rng.bernoulli(noise.dropout_rate)) return;
    if (rng.bernoulli(noise.label_flip_rate)) {
      const auto shift = 1 + rng.below(kLabelCount - 1);
      p.label = static_cast<SemanticLabel>((static_cast<int>(p.label) + shift) % kLabelCount);
    }
    cloud.points.push_back(p);
  };

  for (const auto idx : cells) {
    const CellIndex c{static_cast<int>(idx % grid.width()), static_cast<int>(idx / grid.width())};
    const double x0 = c.col * res, y0 = c.row * res;
    const int i0 = static_cast<int>(std::ceil(x0 / s - 0.5)), i1 = static_cast<int>(std::ceil((x0 + res) / s - 0.5));
    const int j0 = static_cast<int>(std::ceil(y0 / s - 0.5)), j1 = static_cast<int>(std::ceil((y0 + res) / s - 0.5));
    const Cell v = grid.at(c);
    const int fidx = world.furniture_at(c);
    for (int j = j0; j < j1; ++j)
      for (int i = i0; i < i1; ++i) {
        const Vec2 p{(i + 0.5) * s, (j + 0.5) * s};
        if (!in_view(sensor, p, cam.fov_horizontal, cam.max_range)) continue;
        if (v == Cell::Free) {
          emit({p.x, p.y, 0.0, SemanticLabel::Floor});
        } else if (fidx >= 0) {
          const auto& f = world.furniture()[fidx];
          if (contains(f.footprint, p))
            emit({p.x, p.y, f.surface_height, label_for(f.cls, f.surface_height, options)});
          else
            emit({p.x, p.y, 0.0, SemanticLabel::Floor});
        } else {
          const auto label = v == Cell::Unknown ? SemanticLabel::Unknown : SemanticLabel::Wall;
          for (double z : {0.5, 1.0, 1.5, 2.0}) emit({p.x, p.y, z, label});
        }
      }
  }

  for (const auto& o : world.objects()) {
    const auto c = grid.cell_of({o.pose.x, o.pose.y});
    if (!c || !visible[grid.index(c->col, c->row)]) continue;
    if (!in_view(sensor, {o.pose.x, o.pose.y}, cam.fov_horizontal, cam.max_range)) continue;
    for (double dz : {0.05, 0.10, 0.15}) emit({o.pose.x, o.pose.y, o.pose.z + dz, SemanticLabel::Object});
  }
  return cloud;
}

int rotation_steps(double step_deg, double total_deg) {
  if (!(step_deg > 0.0) || !(total_deg > 0.0)) throw std::invalid_argument("rotation step and total must be positive");
  const double n = total_deg / step_deg;
  if (std::abs(n - std::round(n)) > 1e-9) throw std::invalid_argument("total/step must be integral");
  return static_cast<int>(std::round(n));
}

std::vector<LabeledCloud> rotation_scan(const WorldModel& world, const Pose2& center, const PerceptionNoise& noise,
                                        Rng& rng, double step_deg, double total_deg, const SenseOptions& options) {
  const int n = rotation_steps(step_deg, total_deg);
  std::vector<LabeledCloud> clouds;
  clouds.reserve(n);
  for (int k = 1; k <= n; ++k) {
    Pose2 heading = center;
    heading.yaw = wrap_angle(center.yaw + k * step_deg * std::numbers::pi / 180.0);
    clouds.push_back(sense_semantic(world, heading, noise, rng, options));
  }
  return clouds;
}

RecognitionResult recognize_objects(const WorldModel& world, const Pose2& sensor, const std::string& target,
                                    const PerceptionNoise& noise, Rng& rng) {
  const auto& cam = world.agent().camera;
  const auto& grid = world.grid();
  const auto cells = visible_cells(world, sensor, cam.fov_horizontal, cam.recognition_range);
  std::vector<char> visible(grid.cells().size(), 0);
  for (auto i : cells) visible[i] = 1;

  RecognitionResult result;
  for (const auto& o : world.objects()) {
    const Vec2 p{o.pose.x, o.pose.y};
    const auto c = grid.cell_of(p);
    if (!c || !visible[grid.index(c->col, c->row)]) continue;
    if (!in_view(sensor, p, cam.fov_horizontal, cam.recognition_range)) continue;
    if (rng.bernoulli(noise.p_true_positive))
      result.detections.push_back({o.name, {o.pose.x, o.pose.y, o.pose.z, 0.0, 0.0, o.pose.yaw}, true});
  }

  if (rng.bernoulli(noise.p_false_positive)) {
    std::vector<Vec2> spots;
    for (auto idx : cells) {
      const CellIndex c{static_cast<int>(idx % grid.width()), static_cast<int>(idx / grid.width())};
      const Vec2 p = grid.center_of(c);
      if (in_view(sensor, p, cam.fov_horizontal, cam.recognition_range)) spots.push_back(p);
    }
    if (spots.empty()) spots.push_back(sensor.position());
    const Vec2 p = spots[rng.below(spots.size())];
    double z = 0.0;
    if (const auto c = grid.cell_of(p); c && world.furniture_at(*c) >= 0)
      z = world.furniture()[world.furniture_at(*c)].surface_height;
    result.detections.push_back({target, {p.x, p.y, z, 0.0, 0.0, rng.uniform(-std::numbers::pi, std::numbers::pi)}, false});
  }
  return result;
}

bool detect_user(const WorldModel& world, const std::string& robot_room, const PerceptionNoise& noise, Rng& rng) {
  if (world.agent().user_room_actual != robot_room) return false;
  return rng.bernoulli(noise.p_user_detection);
}

void write_cloud_csv(std::ostream& out, const LabeledCloud& cloud) {
  out << "x,y,z,label\n";
  for (const auto& p : cloud.points) out << p.x << ',' << p.y << ',' << p.z << ',' << to_string(p.label) << '\n';
}

}  // namespace fetchsim
