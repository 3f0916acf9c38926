#include "fetchsim/scenario.hpp"

#include <fstream>

#include "fetchsim/errors.hpp"
#include "json_util.hpp"

namespace fetchsim {

using detail::get;
using detail::get_or;
using nlohmann::json;

PerceptionNoise noise_from_json(const json& doc, const PerceptionNoise& base, const std::string& path) {
  PerceptionNoise n = base;
  n.label_flip_rate = get_or<double>(doc, "label_flip_rate", path, n.label_flip_rate);
  n.dropout_rate = get_or<double>(doc, "dropout_rate", path, n.dropout_rate);
  n.p_true_positive = get_or<double>(doc, "p_true_positive", path, n.p_true_positive);
  n.p_false_positive = get_or<double>(doc, "p_false_positive", path, n.p_false_positive);
  n.p_user_detection = get_or<double>(doc, "p_user_detection", path, n.p_user_detection);
  n.seed = get_or<std::uint64_t>(doc, "seed", path, n.seed);
  n.validate();
  return n;
}

json noise_to_json(const PerceptionNoise& n) {
  return {{"label_flip_rate", n.label_flip_rate}, {"dropout_rate", n.dropout_rate},
          {"p_true_positive", n.p_true_positive}, {"p_false_positive", n.p_false_positive},
          {"p_user_detection", n.p_user_detection}, {"seed", n.seed}};
}

Scenario load_scenario(const json& doc) {
  Scenario s{world_from_json(doc), {}, {}, {}, {}, {}};

  if (doc.contains("annotations")) {
    const json& arr = detail::require_array(doc, "annotations", "$");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = detail::at_index("annotations", i);
      s.annotations.push_back({get<std::string>(arr[i], "id", path),
                               {get<double>(arr[i], "x", path), get<double>(arr[i], "y", path),
                                get_or<double>(arr[i], "yaw", path, 0.0)}});
    }
    build_agenda_manual(s.world, s.annotations);  // fail fast on bad annotations
  }

  if (doc.contains("durations")) {
    const json& d = doc.at("durations");
    auto& m = s.durations;
    m.translate_speed = get_or<double>(d, "translate_speed", "durations", m.translate_speed);
    m.rotate_speed = get_or<double>(d, "rotate_speed", "durations", m.rotate_speed);
    m.segmentation_time = get_or<double>(d, "segmentation_time", "durations", m.segmentation_time);
    m.rotate_step_time = get_or<double>(d, "rotate_step_time", "durations", m.rotate_step_time);
    m.recognition_time = get_or<double>(d, "recognition_time", "durations", m.recognition_time);
    m.grasp_time = get_or<double>(d, "grasp_time", "durations", m.grasp_time);
    m.tray_time = get_or<double>(d, "tray_time", "durations", m.tray_time);
    m.user_detection_time = get_or<double>(d, "user_detection_time", "durations", m.user_detection_time);
    m.inform_time = get_or<double>(d, "inform_time", "durations", m.inform_time);
  }
  s.durations.validate();

  if (doc.contains("noise")) s.noise = noise_from_json(doc.at("noise"), s.noise, "noise");

  if (doc.contains("cost")) {
    const json& c = doc.at("cost");
    s.cost.k1 = get_or<double>(c, "k1", "cost", s.cost.k1);
    s.cost.k2 = get_or<double>(c, "k2", "cost", s.cost.k2);
    s.cost.k_pen = get_or<double>(c, "k_pen", "cost", s.cost.k_pen);
    if (c.contains("bat_normalizer")) s.cost.bat_normalizer = get<double>(c, "bat_normalizer", "cost");
    const auto transform = get_or<std::string>(c, "transform", "cost", "linear");
    if (transform == "linear")
      s.cost.transform = ProbabilityTransform::Linear;
    else if (transform == "neg_log")
      s.cost.transform = ProbabilityTransform::NegLog;
    else
      throw SchemaError("cost.transform", "expected 'linear' or 'neg_log'");
  }
  s.cost.validate();

  if (doc.contains("heuristics")) {
    const json& h = doc.at("heuristics");
    auto& p = s.heuristics;
    if (h.contains("height_band")) {
      const auto band = get<std::vector<double>>(h, "height_band", "heuristics");
      if (band.size() != 2) throw SchemaError("heuristics.height_band", "expected [min, max]");
      p.band_min = band[0];
      p.band_max = band[1];
    }
    p.cluster_tolerance = get_or<double>(h, "cluster_tolerance", "heuristics", p.cluster_tolerance);
    p.min_cluster_points = get_or<int>(h, "min_cluster_points", "heuristics", p.min_cluster_points);
    p.security_distance = get_or<double>(h, "security_distance", "heuristics", p.security_distance);
  }
  s.heuristics.validate();
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string(), "cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return load_scenario(doc);
}

json scenario_to_json(const Scenario& s) {
  json doc = json::object();
  world_to_json(s.world, doc);
  json ann = json::array();
  for (const auto& a : s.annotations) ann.push_back({{"id", a.id}, {"x", a.pose.x}, {"y", a.pose.y}, {"yaw", a.pose.yaw}});
  doc["annotations"] = ann;
  const auto& d = s.durations;
  doc["durations"] = {{"translate_speed", d.translate_speed}, {"rotate_speed", d.rotate_speed},
                      {"segmentation_time", d.segmentation_time}, {"rotate_step_time", d.rotate_step_time},
                      {"recognition_time", d.recognition_time}, {"grasp_time", d.grasp_time},
                      {"tray_time", d.tray_time}, {"user_detection_time", d.user_detection_time},
                      {"inform_time", d.inform_time}};
  doc["noise"] = noise_to_json(s.noise);
  json cost = {{"k1", s.cost.k1}, {"k2", s.cost.k2}, {"k_pen", s.cost.k_pen},
               {"transform", s.cost.transform == ProbabilityTransform::Linear ? "linear" : "neg_log"}};
  if (s.cost.bat_normalizer) cost["bat_normalizer"] = *s.cost.bat_normalizer;
  doc["cost"] = cost;
  const auto& h = s.heuristics;
  doc["heuristics"] = {{"height_band", {h.band_min, h.band_max}},
                       {"cluster_tolerance", h.cluster_tolerance},
                       {"min_cluster_points", h.min_cluster_points},
                       {"security_distance", h.security_distance}};
  return doc;
}

}  // namespace fetchsim
