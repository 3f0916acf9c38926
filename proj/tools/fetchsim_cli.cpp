// fetchsim: run fetch missions, compare strategies, inspect generated poses.
//
// Exit codes: 0 success, 1 usage error, 2 scenario or runtime error.

#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fetchsim/errors.hpp"
#include "fetchsim/experiment.hpp"
#include "fetchsim/mission.hpp"
#include "fetchsim/scenario.hpp"

using namespace fetchsim;

namespace {

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write '" + out_path + "'");
  out << text;
}

std::string render_report(const MissionReport& r, const std::string& format) {
  if (format == "json") return report_to_json(r).dump(2) + "\n";
  std::ostringstream out;
  if (format == "csv") {
    out << "target,strategy,seed,outcome,detected,duration_s,duration,positions_visited,positions_total,user_informed\n"
        << r.target << ',' << to_string(r.strategy) << ',' << r.seed << ',' << r.outcome << ','
        << to_string(r.object_detected) << ',' << r.duration << ',' << format_mmss(r.duration) << ','
        << r.positions_visited << ',' << r.positions_total << ',' << (r.user_informed ? "true" : "false") << '\n';
    return out.str();
  }
  out << "| Object | Strategy | Detected | Duration | #p | Outcome |\n|---|---|---|---|---|---|\n"
      << "| " << r.target << " | " << to_string(r.strategy) << " | " << to_string(r.object_detected) << " | "
      << format_mmss(r.duration) << " | " << r.positions_visited << "/" << r.positions_total << " | " << r.outcome
      << " |\n\n";
  if (!r.message.empty()) out << "Message: " << r.message << "\n";
  out << "Visited: ";
  for (std::size_t i = 0; i < r.visited_locations.size(); ++i) out << (i ? ", " : "") << r.visited_locations[i];
  out << "\nTime (s): navigation " << r.time.navigation << ", scanning " << r.time.scanning << ", recognition "
      << r.time.recognition << ", manipulation " << r.time.manipulation << ", user interaction "
      << r.time.user_interaction << "\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fetch-and-carry search simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::string format = "md";
  const auto formats = CLI::IsMember({"md", "csv", "json"});

  auto* run = app.add_subcommand("run", "Run one fetch mission");
  std::string strategy_name = "manual";
  std::string object;
  std::uint64_t seed = 0;
  bool concurrent = false;
  bool no_learn = false;
  std::string trace_path;
  std::string start_room;
  std::string user_room;
  run->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--strategy", strategy_name, "manual | semantic")
      ->check(CLI::IsMember({"manual", "semantic", "predefined", "generated", "P", "S"}));
  run->add_option("--object", object, "Object to fetch")->required();
  run->add_option("--seed", seed, "Random seed");
  run->add_flag("--concurrent-scan", concurrent, "Overlap segmentation with rotation");
  run->add_flag("--no-learn", no_learn, "Do not update sighting probabilities");
  run->add_option("--start-room", start_room, "Start at this room's center pose");
  run->add_option("--user-room", user_room, "Room the user was last seen in");
  run->add_option("--report", format, "md | csv | json")->check(formats);
  run->add_option("--out", out_path, "Write the report here instead of stdout");
  run->add_option("--trace", trace_path, "Write the state trace here");

  auto* compare = app.add_subcommand("compare", "Compare both strategies over an experiment");
  std::string experiment_path;
  compare->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  compare->add_option("--experiment", experiment_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  compare->add_flag("--concurrent-scan", concurrent, "Overlap segmentation with rotation");
  compare->add_option("--report", format, "md | csv | json")->check(formats);
  compare->add_option("--out", out_path, "Write the table here instead of stdout");

  auto* gen = app.add_subcommand("gen-poses", "Scan a room and print the generated search positions");
  std::string room;
  bool merge = false;
  int centers = 1;
  double min_overlap = 0.5;
  std::string clusters_path;
  gen->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--room", room, "Room to scan")->required();
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--centers", centers, "Overlay scans from this many centers (room center first)")
      ->check(CLI::Range(1, 1000));
  gen->add_flag("--cluster", merge, "Merge nearby positions");
  gen->add_option("--min-overlap", min_overlap, "Sector overlap needed to merge")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--clusters-csv", clusters_path, "Write the table clusters here");
  gen->add_option("--out", out_path, "Write the positions CSV here instead of stdout");

  auto* val = app.add_subcommand("validate", "Load a scenario and check every invariant");
  val->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const Scenario scenario = load_scenario_file(scenario_path);

    if (*run) {
      ExperimentTest test;
      test.name = "run";
      test.object = object;
      if (!start_room.empty()) test.start_room = start_room;
      if (!user_room.empty()) test.user_room = user_room;
      const Scenario s = apply_test(scenario, test);
      MissionConfig cfg;
      cfg.target_object = object;
      cfg.strategy = *strategy_from_string(strategy_name);
      cfg.seed = seed;
      cfg.concurrent_scan = concurrent;
      cfg.learn = !no_learn;
      const auto report = run_mission(cfg, s, annotation_table(s));
      emit(render_report(report, format), out_path);
      if (!trace_path.empty()) emit(hsm::trace_to_text(report.trace), trace_path);
    } else if (*compare) {
      auto spec = load_experiment_file(experiment_path, scenario.noise);
      spec.concurrent_scan = spec.concurrent_scan || concurrent;
      const auto table = run_experiment(scenario, spec);
      const std::string text = format == "json" ? table.to_json().dump(2) + "\n"
                               : format == "csv" ? table.to_csv()
                                                 : table.to_markdown();
      emit(text, out_path);
    } else if (*gen) {
      const auto& world = scenario.world;
      if (!world.find_room(room)) throw InvariantViolation(room, "unknown room");
      const auto center = room_center_pose(world, room);
      if (!center) throw InvariantViolation(room, "room has no free center pose");
      Rng rng(seed);
      SenseOptions sense;
      sense.graspable_min = scenario.heuristics.band_min;
      sense.graspable_max = scenario.heuristics.band_max;

      // Extra centers are random free cells of the room.
      std::vector<Pose2> poses{*center};
      std::vector<CellIndex> cells;
      const auto& grid = world.grid();
      for (int r = 0; r < grid.height(); ++r)
        for (int c = 0; c < grid.width(); ++c)
          if (grid.is_free({c, r}) && world.room_of(grid.center_of({c, r})) == room) cells.push_back({c, r});
      while (static_cast<int>(poses.size()) < centers) {
        const Vec2 p = grid.center_of(cells[rng.below(cells.size())]);
        poses.push_back({p.x, p.y, rng.uniform(-std::numbers::pi, std::numbers::pi)});
      }

      std::vector<SearchLocation> positions;
      std::vector<TableCluster> all_clusters;
      std::size_t candidates = 0;
      for (std::size_t k = 0; k < poses.size(); ++k) {
        std::vector<TableCluster> clusters;
        const std::string prefix = room + ":" + (centers > 1 ? std::to_string(k) + ":" : "");
        auto generated =
            scan_positions(world, room, poses[k], scenario.heuristics, scenario.noise, rng, prefix, sense, &clusters);
        candidates += generated.candidates;
        positions.insert(positions.end(), generated.positions.begin(), generated.positions.end());
        all_clusters.insert(all_clusters.end(), clusters.begin(), clusters.end());
      }
      const std::size_t before = positions.size();
      if (merge) {
        const auto& cam = world.agent().camera;
        positions = cluster_positions(positions, world, cam.fov_horizontal, cam.recognition_range, min_overlap);
      }
      std::ostringstream out;
      write_positions_csv(out, positions);
      emit(out.str(), out_path);
      if (!clusters_path.empty()) {
        std::ostringstream c;
        write_clusters_csv(c, all_clusters);
        emit(c.str(), clusters_path);
      }
      std::cerr << poses.size() << " scan centers, " << all_clusters.size() << " table clusters, " << candidates
                << " candidates, " << before << " positions";
      if (merge) std::cerr << ", " << positions.size() << " after merging";
      std::cerr << "\n";
    } else if (*val) {
      for (const auto& o : scenario.world.objects()) {
        for (auto kind : {StrategyKind::Manual, StrategyKind::Generated}) {
          MissionConfig cfg;
          cfg.target_object = o.name;
          cfg.strategy = kind;
          build_mission(cfg, scenario, annotation_table(scenario));
        }
      }
      std::cout << "ok: " << scenario.world.rooms().size() << " rooms, " << scenario.world.furniture().size()
                << " furniture, " << scenario.world.objects().size() << " objects, "
                << scenario.annotations.size() << " annotations\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
