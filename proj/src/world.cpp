#include "fetchsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fetchsim/errors.hpp"
#include "json_util.hpp"

namespace fetchsim {

OccupancyGrid::OccupancyGrid(double resolution, int width, int height, std::vector<Cell> cells)
    : resolution_(resolution), width_(width), height_(height), cells_(std::move(cells)) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw InvariantViolation("grid", "resolution must be positive");
  if (width <= 0 || height <= 0) throw InvariantViolation("grid", "width and height must be positive");
  if (cells_.size() != static_cast<std::size_t>(width) * height)
    throw InvariantViolation("grid", "cell count does not match width*height");
}

std::optional<CellIndex> OccupancyGrid::cell_of(Vec2 p) const {
  if (!(p.x >= 0.0) || !(p.y >= 0.0)) return std::nullopt;
  const double cx = std::floor(p.x / resolution_), cy = std::floor(p.y / resolution_);
  if (cx >= width_ || cy >= height_) return std::nullopt;
  return CellIndex{static_cast<int>(cx), static_cast<int>(cy)};
}

std::size_t OccupancyGrid::free_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), Cell::Free));
}

std::string to_string(FurnitureClass c) {
  switch (c) {
    case FurnitureClass::Table: return "table";
    case FurnitureClass::Shelf: return "shelf";
    case FurnitureClass::Cabinet: return "cabinet";
    case FurnitureClass::Nightstand: return "nightstand";
    case FurnitureClass::Windowsill: return "windowsill";
    case FurnitureClass::Other: return "other";
  }
  return "other";
}

std::optional<FurnitureClass> furniture_class_from_string(const std::string& s) {
  for (auto c : {FurnitureClass::Table, FurnitureClass::Shelf, FurnitureClass::Cabinet, FurnitureClass::Nightstand,
                 FurnitureClass::Windowsill, FurnitureClass::Other})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

namespace {

bool rooms_overlap(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (segments_cross(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return true;
  auto strictly_inside = [](Vec2 p, const Polygon& poly) {
    return inside_even_odd(p, poly) && !on_boundary(p, poly, kBoundaryEpsilon);
  };
  for (const auto& p : a)
    if (strictly_inside(p, b)) return true;
  for (const auto& p : b)
    if (strictly_inside(p, a)) return true;
  return strictly_inside(polygon_centroid(a), b) || strictly_inside(polygon_centroid(b), a);
}

}  // namespace

WorldModel WorldModel::build(OccupancyGrid grid, std::vector<Room> rooms, std::vector<Furniture> furniture,
                             std::vector<SceneObject> objects, AgentState agent) {
  WorldModel w;
  if (grid.free_count() == 0) throw InvariantViolation("grid", "map has no Free cell");

  std::set<std::string> ids;
  for (const auto& r : rooms) {
    if (r.id.empty()) throw InvariantViolation("room", "empty id");
    if (!ids.insert(r.id).second) throw InvariantViolation("room " + r.id, "duplicate id");
    if (!is_simple(r.polygon)) throw InvariantViolation("room " + r.id, "polygon is not simple");
  }
  for (std::size_t i = 0; i < rooms.size(); ++i)
    for (std::size_t j = i + 1; j < rooms.size(); ++j)
      if (rooms_overlap(rooms[i].polygon, rooms[j].polygon))
        throw InvariantViolation("room " + rooms[i].id, "overlaps room " + rooms[j].id);
  w.rooms_ = std::move(rooms);
  for (auto& r : w.rooms_)
    if (r.label.empty()) {
      r.label = r.id;
      std::replace(r.label.begin(), r.label.end(), '_', ' ');
    }

  ids.clear();
  for (const auto& f : furniture) {
    const std::string who = "furniture " + f.id;
    if (f.id.empty()) throw InvariantViolation("furniture", "empty id");
    if (!ids.insert(f.id).second) throw InvariantViolation(who, "duplicate id");
    if (!is_simple(f.footprint)) throw InvariantViolation(who, "footprint is not simple");
    if (!(f.surface_height >= 0.0) || !std::isfinite(f.surface_height))
      throw InvariantViolation(who, "surface_height must be >= 0");
    const Room* room = w.find_room(f.room_id);
    if (!room) throw InvariantViolation(who, "unknown room '" + f.room_id + "'");
    for (const auto& v : f.footprint)
      if (!contains(room->polygon, v)) throw InvariantViolation(who, "footprint leaves room " + f.room_id);
  }
  w.furniture_ = std::move(furniture);

  w.base_grid_ = grid;
  w.furniture_cells_.assign(grid.cells().size(), -1);
  const double res = grid.resolution();
  const double shrink = 1e-9;
  for (std::size_t k = 0; k < w.furniture_.size(); ++k) {
    const auto& fp = w.furniture_[k].footprint;
    double xmin = fp[0].x, xmax = fp[0].x, ymin = fp[0].y, ymax = fp[0].y;
    for (const auto& v : fp) {
      xmin = std::min(xmin, v.x), xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y), ymax = std::max(ymax, v.y);
    }
    const int c0 = std::max(0, static_cast<int>(std::floor(xmin / res)));
    const int c1 = std::min(grid.width() - 1, static_cast<int>(std::floor(xmax / res)));
    const int r0 = std::max(0, static_cast<int>(std::floor(ymin / res)));
    const int r1 = std::min(grid.height() - 1, static_cast<int>(std::floor(ymax / res)));
    for (int row = r0; row <= r1; ++row)
      for (int col = c0; col <= c1; ++col) {
        const Vec2 lo{col * res + shrink, row * res + shrink};
        const Vec2 hi{(col + 1) * res - shrink, (row + 1) * res - shrink};
        if (!box_overlaps_polygon(lo, hi, fp)) continue;
        grid.set(col, row, Cell::Occupied);
        auto& slot = w.furniture_cells_[grid.index(col, row)];
        if (slot < 0) slot = static_cast<int>(k);
      }
  }
  if (grid.free_count() == 0) throw InvariantViolation("grid", "no Free cell left after rasterizing furniture");
  w.grid_ = std::move(grid);

  ids.clear();
  for (const auto& o : objects) {
    const std::string who = "object " + o.id;
    if (o.id.empty() || o.name.empty()) throw InvariantViolation("object", "empty id or name");
    if (!ids.insert(o.id).second) throw InvariantViolation(who, "duplicate id");
    if (o.supporting_furniture) {
      const Furniture* f = w.find_furniture(*o.supporting_furniture);
      if (!f) throw InvariantViolation(who, "unknown supporting furniture '" + *o.supporting_furniture + "'");
      if (std::abs(o.pose.z - f->surface_height) > 1e-6)
        throw InvariantViolation(who, "z does not match the surface height of " + f->id);
      if (!contains(f->footprint, {o.pose.x, o.pose.y}))
        throw InvariantViolation(who, "(x, y) lies outside the footprint of " + f->id);
    }
  }
  w.objects_ = std::move(objects);

  if (agent.user_room_actual.empty()) agent.user_room_actual = agent.user_room_last_seen;
  if (!w.find_room(agent.user_room_last_seen))
    throw InvariantViolation("user", "unknown last-seen room '" + agent.user_room_last_seen + "'");
  if (!w.find_room(agent.user_room_actual))
    throw InvariantViolation("user", "unknown actual room '" + agent.user_room_actual + "'");
  const auto& cam = agent.camera;
  if (!(cam.mount_height > 0) || !(cam.max_range > 0) || !(cam.recognition_range > 0) ||
      !(cam.fov_horizontal > 0 && cam.fov_horizontal <= 2 * std::numbers::pi))
    throw InvariantViolation("camera", "mount height, ranges and fov must be positive (fov <= 360 deg)");
  w.agent_ = std::move(agent);
  if (w.is_occupied(w.agent_.robot_pose.position()))
    throw InvariantViolation("robot", "pose is not on a Free cell");
  return w;
}

const Room* WorldModel::find_room(const std::string& id) const {
  for (const auto& r : rooms_)
    if (r.id == id) return &r;
  return nullptr;
}

const Furniture* WorldModel::find_furniture(const std::string& id) const {
  for (const auto& f : furniture_)
    if (f.id == id) return &f;
  return nullptr;
}

const SceneObject* WorldModel::find_object(const std::string& name) const {
  for (const auto& o : objects_)
    if (o.name == name || o.id == name) return &o;
  return nullptr;
}

int WorldModel::furniture_at(CellIndex c) const {
  if (!grid_.in_bounds(c.col, c.row)) return -1;
  return furniture_cells_[grid_.index(c.col, c.row)];
}

std::optional<std::string> WorldModel::room_of(Vec2 p) const {
  for (const auto& r : rooms_)
    if (contains(r.polygon, p)) return r.id;
  return std::nullopt;
}

bool WorldModel::is_occupied(Vec2 p) const {
  const auto c = grid_.cell_of(p);
  return !c || grid_.at(*c) != Cell::Free;
}

double WorldModel::diagonal() const { return std::hypot(grid_.width_m(), grid_.height_m()); }

WorldModel WorldModel::with_agent(AgentState agent) const {
  return build(base_grid_, rooms_, furniture_, objects_, std::move(agent));
}

WorldModel WorldModel::with_objects(std::vector<SceneObject> objects) const {
  return build(base_grid_, rooms_, furniture_, std::move(objects), agent_);
}

// ---------------------------------------------------------------------------
// JSON

using detail::get;
using detail::get_or;
using nlohmann::json;

WorldModel world_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("$", "scenario must be an object");

  const json& g = detail::require(doc, "grid", "$");
  const double res = get<double>(g, "resolution", "grid");
  const int width = get<int>(g, "width", "grid");
  const int height = get<int>(g, "height", "grid");
  if (!(res > 0)) throw SchemaError("grid.resolution", "must be positive");
  if (width <= 0 || height <= 0) throw SchemaError("grid", "width and height must be positive");
  const json& rows = detail::require_array(g, "rows", "grid");
  if (rows.size() != static_cast<std::size_t>(height))
    throw SchemaError("grid.rows", "expected " + std::to_string(height) + " rows, got " + std::to_string(rows.size()));
  std::vector<Cell> cells(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    const std::string path = detail::at_index("grid.rows", r);
    if (!rows[r].is_string()) throw SchemaError(path, "expected a string");
    const auto line = rows[r].get<std::string>();
    if (line.size() != static_cast<std::size_t>(width))
      throw SchemaError(path, "expected " + std::to_string(width) + " characters");
    const int grid_row = height - 1 - r;  // first string is the top row
    for (int c = 0; c < width; ++c) {
      Cell v;
      switch (line[c]) {
        case '.': v = Cell::Free; break;
        case '#': v = Cell::Occupied; break;
        case '?': v = Cell::Unknown; break;
        default: throw SchemaError(path, std::string("invalid cell character '") + line[c] + "'");
      }
      cells[static_cast<std::size_t>(grid_row) * width + c] = v;
    }
  }
  OccupancyGrid grid(res, width, height, std::move(cells));

  std::vector<Room> rooms;
  const json& jrooms = detail::require_array(doc, "rooms", "$");
  for (std::size_t i = 0; i < jrooms.size(); ++i) {
    const std::string path = detail::at_index("rooms", i);
    rooms.push_back({get<std::string>(jrooms[i], "id", path), get_or<std::string>(jrooms[i], "label", path, ""),
                     detail::polygon_from(jrooms[i], "polygon", path)});
  }

  std::vector<Furniture> furniture;
  if (doc.contains("furniture")) {
    const json& jf = detail::require_array(doc, "furniture", "$");
    for (std::size_t i = 0; i < jf.size(); ++i) {
      const std::string path = detail::at_index("furniture", i);
      Furniture f;
      f.id = get<std::string>(jf[i], "id", path);
      const auto cls = get<std::string>(jf[i], "class", path);
      auto parsed = furniture_class_from_string(cls);
      if (!parsed) throw SchemaError(path + ".class", "unknown furniture class '" + cls + "'");
      f.cls = *parsed;
      f.footprint = detail::polygon_from(jf[i], "footprint", path);
      f.surface_height = get<double>(jf[i], "surface_height", path);
      f.room_id = get<std::string>(jf[i], "room", path);
      furniture.push_back(std::move(f));
    }
  }

  std::vector<SceneObject> objects;
  if (doc.contains("objects")) {
    const json& jo = detail::require_array(doc, "objects", "$");
    for (std::size_t i = 0; i < jo.size(); ++i) {
      const std::string path = detail::at_index("objects", i);
      SceneObject o;
      o.id = get<std::string>(jo[i], "id", path);
      o.name = get_or<std::string>(jo[i], "name", path, o.id);
      if (jo[i].contains("on")) o.supporting_furniture = get<std::string>(jo[i], "on", path);
      const json& p = detail::require(jo[i], "pose", path);
      o.pose.x = get<double>(p, "x", path + ".pose");
      o.pose.y = get<double>(p, "y", path + ".pose");
      o.pose.yaw = get_or<double>(p, "yaw", path + ".pose", 0.0);
      if (p.contains("z")) {
        o.pose.z = get<double>(p, "z", path + ".pose");
      } else {
        const Furniture* sup = nullptr;
        for (const auto& f : furniture)
          if (o.supporting_furniture && f.id == *o.supporting_furniture) sup = &f;
        o.pose.z = sup ? sup->surface_height : 0.0;
      }
      objects.push_back(std::move(o));
    }
  }

  AgentState agent;
  const json& robot = detail::require(doc, "robot", "$");
  agent.robot_pose = {get<double>(robot, "x", "robot"), get<double>(robot, "y", "robot"),
                      get_or<double>(robot, "yaw", "robot", 0.0)};
  const json& user = detail::require(doc, "user", "$");
  agent.user_room_last_seen = get<std::string>(user, "last_seen_room", "user");
  agent.user_room_actual = get_or<std::string>(user, "actual_room", "user", agent.user_room_last_seen);
  if (doc.contains("camera")) {
    const json& cam = doc.at("camera");
    Camera defaults;
    agent.camera.mount_height = get_or<double>(cam, "mount_height", "camera", defaults.mount_height);
    if (cam.contains("fov"))
      agent.camera.fov_horizontal = get<double>(cam, "fov", "camera");
    else if (cam.contains("fov_deg"))
      agent.camera.fov_horizontal = get<double>(cam, "fov_deg", "camera") * std::numbers::pi / 180.0;
    agent.camera.max_range = get_or<double>(cam, "max_range", "camera", defaults.max_range);
    agent.camera.recognition_range = get_or<double>(cam, "recognition_range", "camera", defaults.recognition_range);
  }
  return WorldModel::build(std::move(grid), std::move(rooms), std::move(furniture), std::move(objects),
                           std::move(agent));
}

void world_to_json(const WorldModel& world, json& doc) {
  const auto& g = world.base_grid();
  json rows = json::array();
  for (int r = g.height() - 1; r >= 0; --r) {
    std::string line(static_cast<std::size_t>(g.width()), '.');
    for (int c = 0; c < g.width(); ++c) {
      const Cell v = g.at(c, r);
      line[c] = v == Cell::Free ? '.' : v == Cell::Occupied ? '#' : '?';
    }
    rows.push_back(std::move(line));
  }
  doc["grid"] = {{"resolution", g.resolution()}, {"width", g.width()}, {"height", g.height()}, {"rows", rows}};

  json rooms = json::array();
  for (const auto& r : world.rooms())
    rooms.push_back({{"id", r.id}, {"label", r.label}, {"polygon", detail::polygon_to(r.polygon)}});
  doc["rooms"] = rooms;

  json furniture = json::array();
  for (const auto& f : world.furniture())
    furniture.push_back({{"id", f.id},
                         {"class", to_string(f.cls)},
                         {"footprint", detail::polygon_to(f.footprint)},
                         {"surface_height", f.surface_height},
                         {"room", f.room_id}});
  doc["furniture"] = furniture;

  json objects = json::array();
  for (const auto& o : world.objects()) {
    json jo = {{"id", o.id},
               {"name", o.name},
               {"pose", {{"x", o.pose.x}, {"y", o.pose.y}, {"z", o.pose.z}, {"yaw", o.pose.yaw}}}};
    if (o.supporting_furniture) jo["on"] = *o.supporting_furniture;
    objects.push_back(std::move(jo));
  }
  doc["objects"] = objects;

  const auto& a = world.agent();
  doc["robot"] = {{"x", a.robot_pose.x}, {"y", a.robot_pose.y}, {"yaw", a.robot_pose.yaw}};
  doc["user"] = {{"last_seen_room", a.user_room_last_seen}, {"actual_room", a.user_room_actual}};
  doc["camera"] = {{"mount_height", a.camera.mount_height},
                   {"fov", a.camera.fov_horizontal},
                   {"max_range", a.camera.max_range},
                   {"recognition_range", a.camera.recognition_range}};
}

}  // namespace fetchsim
