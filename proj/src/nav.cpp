#include "fetchsim/nav.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "fetchsim/errors.hpp"

namespace fetchsim {

void DurationModel::validate() const {
  for (double v : {translate_speed, rotate_speed, segmentation_time, rotate_step_time, recognition_time, grasp_time,
                   tray_time, user_detection_time, inform_time})
    if (!(v > 0.0) || !std::isfinite(v)) throw InvariantViolation("durations", "all fields must be strictly positive");
}

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DistanceField::DistanceField(const WorldModel& world, Vec2 start)
    : start_(start),
      resolution_(world.grid().resolution()),
      width_(world.grid().width()),
      height_(world.grid().height()) {
  const auto& grid = world.grid();
  const auto s = grid.cell_of(start);
  if (!s || grid.at(*s) != Cell::Free)
    throw StartOccupied("start (" + std::to_string(start.x) + ", " + std::to_string(start.y) +
                        ") is not on a Free cell");

  dist_.assign(grid.cells().size(), kInf);
  parent_.assign(grid.cells().size(), -1);
  using Entry = std::tuple<double, int, int>;  // (distance, row, col)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist_[grid.index(s->col, s->row)] = 0.0;
  open.emplace(0.0, s->row, s->col);

  const double diag = resolution_ * std::sqrt(2.0);
  static constexpr int kSteps[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  auto free = [&](int c, int r) { return grid.in_bounds(c, r) && grid.at(c, r) == Cell::Free; };

  while (!open.empty()) {
    const auto [d, row, col] = open.top();
    open.pop();
    const std::size_t here = grid.index(col, row);
    if (d > dist_[here]) continue;
    for (const auto& step : kSteps) {
      const int nc = col + step[0], nr = row + step[1];
      if (!free(nc, nr)) continue;
      const bool diagonal = step[0] != 0 && step[1] != 0;
      if (diagonal && (!free(col + step[0], row) || !free(col, row + step[1]))) continue;
      const double nd = d + (diagonal ? diag : resolution_);
      const std::size_t there = grid.index(nc, nr);
      if (nd < dist_[there]) {
        dist_[there] = nd;
        parent_[there] = static_cast<int>(here);
        open.emplace(nd, nr, nc);
      }
    }
  }
}

std::optional<std::size_t> DistanceField::cell(Vec2 p) const {
  if (!(p.x >= 0.0) || !(p.y >= 0.0)) return std::nullopt;
  const double c = std::floor(p.x / resolution_), r = std::floor(p.y / resolution_);
  if (c >= width_ || r >= height_) return std::nullopt;
  return static_cast<std::size_t>(r) * width_ + static_cast<std::size_t>(c);
}

std::optional<double> DistanceField::length_to(Vec2 goal) const {
  const auto c = cell(goal);
  if (!c || dist_[*c] == kInf) return std::nullopt;
  return dist_[*c];
}

std::optional<Path> DistanceField::path_to(Vec2 goal) const {
  const auto c = cell(goal);
  if (!c || dist_[*c] == kInf) return std::nullopt;
  Path path;
  path.length = dist_[*c];
  for (int at = static_cast<int>(*c); at >= 0; at = parent_[at]) {
    const int col = at % width_, row = at / width_;
    path.waypoints.push_back({(col + 0.5) * resolution_, (row + 0.5) * resolution_});
  }
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  return path;
}

std::optional<Path> plan(Vec2 start, Vec2 goal, const WorldModel& world) {
  return DistanceField(world, start).path_to(goal);
}

double path_turns(const Path& path, double start_yaw, std::optional<double> end_yaw) {
  double heading = start_yaw;
  double total = 0.0;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    const double h = heading_to(path.waypoints[i - 1], path.waypoints[i]);
    total += std::abs(wrap_angle(h - heading));
    heading = h;
  }
  if (end_yaw) total += std::abs(wrap_angle(*end_yaw - heading));
  return total;
}

double travel_time(const Path& path, double turns, const DurationModel& model) {
  return path.length / model.translate_speed + turns / model.rotate_speed;
}

double scan_duration(int steps, const DurationModel& model, bool concurrent) {
  if (steps < 1) throw std::invalid_argument("scan_duration: steps must be >= 1");
  const double rot = model.rotate_step_time, seg = model.segmentation_time;
  if (!concurrent) return steps * (rot + seg);
  if (seg >= rot) return rot + steps * seg;
  return steps * rot + seg;
}

}  // namespace fetchsim
