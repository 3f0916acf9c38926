#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fetchsim/rng.hpp"
#include "fetchsim/world.hpp"

namespace fetchsim {

enum class SemanticLabel : std::uint8_t { Floor, Wall, Ceiling, Table, Chair, Cabinet, Object, Unknown };

inline constexpr int kLabelCount = 8;
std::string to_string(SemanticLabel label);

struct LabeledPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  SemanticLabel label = SemanticLabel::Unknown;
  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

struct SensorPose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  double mount_height = 0.0;
  friend bool operator==(const SensorPose&, const SensorPose&) = default;
};

struct LabeledCloud {
  std::vector<LabeledPoint> points;
  SensorPose sensor;
  friend bool operator==(const LabeledCloud&, const LabeledCloud&) = default;
};

struct PerceptionNoise {
  double label_flip_rate = 0.0;
  double dropout_rate = 0.0;
  double p_true_positive = 1.0;
  double p_false_positive = 0.0;  // per recognition attempt
  double p_user_detection = 1.0;  // per user detection attempt
  std::uint64_t seed = 0;

  void validate() const;
};

struct SenseOptions {
  double sample_spacing = 0.05;
  /// Shelf, windowsill and nightstand tops inside this band read as `table`.
  double graspable_min = 0.4;
  double graspable_max = 1.2;
};

/// Horizontal visibility test: within `range` (2D) and `fov` around yaw.
bool in_view(const Pose2& pose, Vec2 p, double fov, double range);

SemanticLabel label_for(FurnitureClass cls, double surface_height, const SenseOptions& options = {});

/// Grid cells seen from `pose` within `fov`/`range`, by 2D ray casting.
/// Walls stop a ray at the wall cell; a ray crosses furniture tops but
/// nothing behind a footprint is seen. Sorted row-major indices.
std::vector<std::size_t> visible_cells(const WorldModel& world, const Pose2& pose, double fov, double range);

/// One simulated segmentation call. Throws SensorPoseOccupied.
LabeledCloud sense_semantic(const WorldModel& world, const Pose2& sensor, const PerceptionNoise& noise, Rng& rng,
                            const SenseOptions& options = {});

/// total/step clouds at headings yaw + k*step, k = 1..total/step.
std::vector<LabeledCloud> rotation_scan(const WorldModel& world, const Pose2& center, const PerceptionNoise& noise,
                                        Rng& rng, double step_deg = 30.0, double total_deg = 360.0,
                                        const SenseOptions& options = {});
int rotation_steps(double step_deg, double total_deg);

struct Pose6 {
  double x = 0.0, y = 0.0, z = 0.0;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;
  friend bool operator==(const Pose6&, const Pose6&) = default;
};

struct Detection {
  std::string name;
  Pose6 pose;
  bool true_positive = true;  // scoring only; the mission never reads it
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct RecognitionResult {
  std::vector<Detection> detections;
};

/// Every object in view and within recognition range is reported with
/// probability p_true_positive; with probability p_false_positive one extra
/// detection of `target` appears at a random visible spot.
RecognitionResult recognize_objects(const WorldModel& world, const Pose2& sensor, const std::string& target,
                                    const PerceptionNoise& noise, Rng& rng);

/// True iff the user is actually in `robot_room` and a Bernoulli draw with
/// p_user_detection succeeds.
bool detect_user(const WorldModel& world, const std::string& robot_room, const PerceptionNoise& noise, Rng& rng);

/// `x,y,z,label` with a header line.
void write_cloud_csv(std::ostream& out, const LabeledCloud& cloud);

}  // namespace fetchsim
