#pragma once

#include <optional>
#include <vector>

#include "fetchsim/world.hpp"

namespace fetchsim {

/// Cell-centre polyline. Consecutive waypoints are 8-adjacent cells.
struct Path {
  std::vector<Vec2> waypoints;
  double length = 0.0;
};

/// Simulated time costs. All fields must be strictly positive.
struct DurationModel {
  double translate_speed = 0.25;    // m/s
  double rotate_speed = 0.5;        // rad/s
  double segmentation_time = 5.0;   // s per segmentation call
  double rotate_step_time = 4.0;    // s per 30 degree scan step incl. cloud capture
  double recognition_time = 20.0;   // s per recognition attempt
  double grasp_time = 60.0;         // s per grasp attempt
  double tray_time = 15.0;          // s to put the object on the tray
  double user_detection_time = 15.0;  // s per user detection attempt
  double inform_time = 30.0;        // s to tell the user the result

  void validate() const;
};

/// Single-source shortest paths on the 8-connected grid. Diagonal steps
/// cost res*sqrt(2) and may not cut a corner past an obstacle. Equal-cost
/// frontier entries expand in (row, col) order.
class DistanceField {
 public:
  /// Throws StartOccupied when `start` is not on a Free cell.
  DistanceField(const WorldModel& world, Vec2 start);

  std::optional<double> length_to(Vec2 goal) const;
  std::optional<Path> path_to(Vec2 goal) const;
  Vec2 start() const noexcept { return start_; }

 private:
  std::optional<std::size_t> cell(Vec2 p) const;

  Vec2 start_;
  double resolution_;
  int width_;
  int height_;
  std::vector<double> dist_;
  std::vector<int> parent_;
};

/// Shortest path or nullopt when the goal is occupied or unreachable.
std::optional<Path> plan(Vec2 start, Vec2 goal, const WorldModel& world);

/// Total absolute heading change when driving `path` from `start_yaw`,
/// finishing at `end_yaw` if given.
double path_turns(const Path& path, double start_yaw, std::optional<double> end_yaw = std::nullopt);

double travel_time(const Path& path, double turns, const DurationModel& model);

/// Time for a full rotation scan of `steps` rotate+segment pairs. In the
/// concurrent mode each segmentation overlaps the next rotation, so only the
/// first rotation (or the last segmentation, whichever stage is faster)
/// stays exposed.
double scan_duration(int steps, const DurationModel& model, bool concurrent);

}  // namespace fetchsim
