#pragma once

#include <string>
#include <vector>

#include "fetchsim/scenario.hpp"
#include "fetchsim/world.hpp"

namespace testutil {

using namespace fetchsim;

inline Polygon rect(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

/// Grid with an Occupied one-cell border and Free interior.
inline OccupancyGrid walled_grid(int w, int h, double res) {
  std::vector<Cell> cells(static_cast<std::size_t>(w) * h, Cell::Free);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      if (r == 0 || c == 0 || r == h - 1 || c == w - 1) cells[static_cast<std::size_t>(r) * w + c] = Cell::Occupied;
  return OccupancyGrid(res, w, h, std::move(cells));
}

inline OccupancyGrid open_grid(int w, int h, double res) {
  return OccupancyGrid(res, w, h, std::vector<Cell>(static_cast<std::size_t>(w) * h, Cell::Free));
}

/// One walled room covering the grid interior, robot at `robot`.
inline WorldModel single_room(int w, int h, double res, std::vector<Furniture> furniture = {},
                              std::vector<SceneObject> objects = {}, Pose2 robot = {-1, -1, 0}) {
  const double W = w * res, H = h * res;
  std::vector<Room> rooms{{"room", "", rect(res, res, W - res, H - res)}};
  if (robot.x < 0) robot = {W / 2 + res / 2, H / 2 + res / 2, 0.0};
  AgentState agent;
  agent.robot_pose = robot;
  agent.user_room_last_seen = "room";
  return WorldModel::build(walled_grid(w, h, res), std::move(rooms), std::move(furniture), std::move(objects), agent);
}

inline Furniture table(std::string id, Polygon footprint, double height = 0.75, std::string room = "room",
                       FurnitureClass cls = FurnitureClass::Table) {
  return {std::move(id), cls, std::move(footprint), height, std::move(room)};
}

inline std::string data_path(const std::string& name) { return std::string(FETCHSIM_DATA_DIR) + "/" + name; }

inline const Scenario& lab() {
  static const Scenario s = load_scenario_file(data_path("lab.json"));
  return s;
}

}  // namespace testutil
