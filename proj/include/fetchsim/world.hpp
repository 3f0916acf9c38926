#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fetchsim/geometry.hpp"

namespace fetchsim {

enum class Cell : std::uint8_t { Free, Occupied, Unknown };

/// Grid coordinates; row 0 is the bottom row (smallest y).
struct CellIndex {
  int col = 0;
  int row = 0;
  friend bool operator==(CellIndex, CellIndex) = default;
};

/// Fixed-resolution map covering [0, width*res) x [0, height*res).
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(double resolution, int width, int height, std::vector<Cell> cells);

  double resolution() const noexcept { return resolution_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double width_m() const noexcept { return width_ * resolution_; }
  double height_m() const noexcept { return height_ * resolution_; }

  bool in_bounds(int col, int row) const noexcept { return col >= 0 && row >= 0 && col < width_ && row < height_; }
  Cell at(int col, int row) const { return cells_[index(col, row)]; }
  Cell at(CellIndex c) const { return at(c.col, c.row); }
  void set(int col, int row, Cell value) { cells_[index(col, row)] = value; }
  bool is_free(CellIndex c) const { return in_bounds(c.col, c.row) && at(c) == Cell::Free; }

  std::optional<CellIndex> cell_of(Vec2 p) const;
  Vec2 center_of(CellIndex c) const { return {(c.col + 0.5) * resolution_, (c.row + 0.5) * resolution_}; }
  std::size_t index(int col, int row) const { return static_cast<std::size_t>(row) * width_ + col; }
  std::size_t free_count() const;
  const std::vector<Cell>& cells() const noexcept { return cells_; }

 private:
  double resolution_ = 0.1;
  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> cells_;
};

struct Room {
  std::string id;
  std::string label;  // human-readable, e.g. "dining room"
  Polygon polygon;
};

enum class FurnitureClass { Table, Shelf, Cabinet, Nightstand, Windowsill, Other };

std::string to_string(FurnitureClass c);
std::optional<FurnitureClass> furniture_class_from_string(const std::string& s);

struct Furniture {
  std::string id;
  FurnitureClass cls = FurnitureClass::Table;
  Polygon footprint;
  double surface_height = 0.0;
  std::string room_id;
};

struct ObjectPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  friend bool operator==(const ObjectPose&, const ObjectPose&) = default;
};

struct SceneObject {
  std::string id;
  std::string name;
  ObjectPose pose;
  std::optional<std::string> supporting_furniture;
};

struct Camera {
  double mount_height = 1.24;
  double fov_horizontal = 58.0 * std::numbers::pi / 180.0;
  double max_range = 4.0;
  /// Objects beyond this distance are never recognized.
  double recognition_range = 2.0;
};

struct AgentState {
  Pose2 robot_pose;
  std::string user_room_last_seen;
  /// Where the user actually is; defaults to the last-seen room.
  std::string user_room_actual;
  Camera camera;
};

/// Immutable ground truth. Furniture footprints are rasterized into the
/// grid on construction; `base_grid()` keeps the map as authored.
class WorldModel {
 public:
  /// Validates every invariant; throws InvariantViolation naming the entity.
  static WorldModel build(OccupancyGrid grid, std::vector<Room> rooms, std::vector<Furniture> furniture,
                          std::vector<SceneObject> objects, AgentState agent);

  const OccupancyGrid& grid() const noexcept { return grid_; }
  const OccupancyGrid& base_grid() const noexcept { return base_grid_; }
  const std::vector<Room>& rooms() const noexcept { return rooms_; }
  const std::vector<Furniture>& furniture() const noexcept { return furniture_; }
  const std::vector<SceneObject>& objects() const noexcept { return objects_; }
  const AgentState& agent() const noexcept { return agent_; }

  const Room* find_room(const std::string& id) const;
  const Furniture* find_furniture(const std::string& id) const;
  const SceneObject* find_object(const std::string& name) const;
  /// Index into furniture() of the piece rasterized on `c`, or -1.
  int furniture_at(CellIndex c) const;

  /// Containing room (closed polygons, boundary epsilon kBoundaryEpsilon;
  /// declaration order breaks ties on shared edges).
  std::optional<std::string> room_of(Vec2 p) const;
  /// True iff the containing cell is Occupied, Unknown or out of bounds.
  bool is_occupied(Vec2 p) const;
  double diagonal() const;

  WorldModel with_agent(AgentState agent) const;
  WorldModel with_objects(std::vector<SceneObject> objects) const;

 private:
  OccupancyGrid base_grid_;
  OccupancyGrid grid_;
  std::vector<Room> rooms_;
  std::vector<Furniture> furniture_;
  std::vector<SceneObject> objects_;
  AgentState agent_;
  std::vector<int> furniture_cells_;
};

/// Parses the world part of a scenario document (grid, rooms, furniture,
/// objects, robot, user, camera). Throws SchemaError or InvariantViolation.
WorldModel world_from_json(const nlohmann::json& doc);
/// Writes the fields world_from_json reads; loads back to an equal model.
void world_to_json(const WorldModel& world, nlohmann::json& doc);

}  // namespace fetchsim
