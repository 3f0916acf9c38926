// Python bindings. Structured results cross the boundary as JSON text; the
// fetchsim package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fetchsim/errors.hpp"
#include "fetchsim/experiment.hpp"
#include "fetchsim/mission.hpp"
#include "fetchsim/scenario.hpp"

namespace py = pybind11;
using namespace fetchsim;
using nlohmann::json;

namespace {

Scenario scenario_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return load_scenario(doc);
}

std::string run(const Scenario& s, const std::string& object, const std::string& strategy, std::uint64_t seed,
                bool concurrent_scan, bool learn, const std::string& table_json) {
  const auto kind = strategy_from_string(strategy);
  if (!kind) throw std::invalid_argument("unknown strategy '" + strategy + "'");
  MissionConfig cfg;
  cfg.target_object = object;
  cfg.strategy = *kind;
  cfg.seed = seed;
  cfg.concurrent_scan = concurrent_scan;
  cfg.learn = learn;
  const auto table = table_json.empty() ? annotation_table(s) : ProbabilityTable::from_json(json::parse(table_json));
  return report_to_json(run_mission(cfg, s, table)).dump();
}

std::string compare(const Scenario& s, const std::string& experiment_json, bool concurrent_scan) {
  auto spec = experiment_from_json(json::parse(experiment_json), s.noise);
  spec.concurrent_scan = spec.concurrent_scan || concurrent_scan;
  return run_experiment(s, spec).to_json().dump();
}

std::string positions(const Scenario& s, const std::string& room, std::uint64_t seed) {
  const auto& w = s.world;
  if (!w.find_room(room)) throw InvariantViolation(room, "unknown room");
  const auto center = room_center_pose(w, room);
  if (!center) throw InvariantViolation(room, "room has no free center pose");
  Rng rng(seed);
  SenseOptions sense;
  sense.graspable_min = s.heuristics.band_min;
  sense.graspable_max = s.heuristics.band_max;
  const auto gen = scan_positions(w, room, *center, s.heuristics, s.noise, rng, room + ":", sense);
  json out = json::array();
  for (const auto& l : gen.positions)
    out.push_back({{"id", l.id}, {"x", l.pose.x}, {"y", l.pose.y}, {"yaw", l.pose.yaw}, {"room", l.room_id}});
  return out.dump();
}

py::object plan_path(const Scenario& s, std::pair<double, double> start, std::pair<double, double> goal) {
  const auto p = plan({start.first, start.second}, {goal.first, goal.second}, s.world);
  if (!p) return py::none();
  std::vector<std::pair<double, double>> pts;
  for (const auto& w : p->waypoints) pts.emplace_back(w.x, w.y);
  return py::make_tuple(p->length, pts);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fetch-and-carry search simulator core";

  static py::exception<Error> base(m, "FetchsimError", PyExc_RuntimeError);
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());

  py::class_<Scenario>(m, "Scenario")
      .def_static("from_json", &scenario_from_text, py::arg("text"))
      .def_static("from_file", [](const std::string& path) { return load_scenario_file(path); }, py::arg("path"))
      .def("to_json", [](const Scenario& s) { return scenario_to_json(s).dump(); })
      .def_property_readonly("rooms",
                             [](const Scenario& s) {
                               std::vector<std::string> ids;
                               for (const auto& r : s.world.rooms()) ids.push_back(r.id);
                               return ids;
                             })
      .def_property_readonly("objects",
                             [](const Scenario& s) {
                               std::vector<std::string> names;
                               for (const auto& o : s.world.objects()) names.push_back(o.name);
                               return names;
                             })
      .def_property_readonly("annotations", [](const Scenario& s) {
        std::vector<std::string> ids;
        for (const auto& a : s.annotations) ids.push_back(a.id);
        return ids;
      });

  m.def("run_mission", &run, py::arg("scenario"), py::arg("object"), py::arg("strategy") = "manual",
        py::arg("seed") = 0, py::arg("concurrent_scan") = false, py::arg("learn") = true,
        py::arg("table_json") = "");
  m.def("compare", &compare, py::arg("scenario"), py::arg("experiment_json"), py::arg("concurrent_scan") = false);
  m.def("generate_positions", &positions, py::arg("scenario"), py::arg("room"), py::arg("seed") = 0);
  m.def("plan", &plan_path, py::arg("scenario"), py::arg("start"), py::arg("goal"));
  m.def(
      "scan_duration",
      [](int steps, double rotate, double segment, bool concurrent) {
        DurationModel d;
        d.rotate_step_time = rotate;
        d.segmentation_time = segment;
        return scan_duration(steps, d, concurrent);
      },
      py::arg("steps") = 12, py::arg("rotate_step_time") = 4.0, py::arg("segmentation_time") = 5.0,
      py::arg("concurrent") = false);
}
