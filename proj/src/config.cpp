#include "lanekit/config.hpp"

#include <fstream>

#include <json.hpp>

namespace lanekit {

using nlohmann::json;

void ToolConfig::validate() const {
  if (keypoints < 4) throw InvalidConfig("config: keypoints must be at least 4");
  if (control_points < 2) throw InvalidConfig("config: control_points must be at least 2");
  if (num_classes < 2) throw InvalidConfig("config: num_classes must be at least 2");
  if (poly_degree < 0) throw InvalidConfig("config: poly_degree must be nonnegative");
  if (chamfer_thresholds.empty()) throw InvalidConfig("config: chamfer_thresholds empty");
  for (double t : chamfer_thresholds)
    if (!(t > 0)) throw InvalidConfig("config: chamfer thresholds must be positive");
  if (!(criteria.point_dist_thresh > 0))
    throw InvalidConfig("config: point_dist_thresh must be positive");
  if (!(criteria.min_matched_fraction > 0 && criteria.min_matched_fraction <= 1))
    throw InvalidConfig("config: min_matched_fraction must be in (0,1]");
  if (!(criteria.confidence_thresh >= 0 && criteria.confidence_thresh <= 1))
    throw InvalidConfig("config: confidence_thresh must be in [0,1]");
  if (!(weights.position >= 0 && weights.shape >= 0 && weights.smoothness >= 0 &&
        weights.bezier >= 0 && weights.cls >= 0))
    throw InvalidConfig("config: cost weights must be nonnegative");
  if (weights.position + weights.shape + weights.smoothness + weights.bezier + weights.cls <=
      0)
    throw InvalidConfig("config: cost weights must not all be zero");
  if (!(range.x_min < range.x_max && range.y_min < range.y_max && range.z_min < range.z_max))
    throw InvalidConfig("config: empty perception range");
  if (eval_samples < 2) throw InvalidConfig("config: eval_samples must be at least 2");
}

ToolConfig ToolConfig::preset(const std::string& mode) {
  ToolConfig cfg;
  cfg.mode = mode;
  if (mode == "openlane") {
    cfg.keypoints = 20;
    cfg.control_points = 5;
    cfg.num_classes = 17;
    cfg.range = {-30.0, 30.0, 3.0, 103.0, -10.0, 10.0};
    cfg.ap_xy_projection = false;
  } else if (mode == "argoverse2") {
    cfg.keypoints = 20;
    cfg.control_points = 10;
    cfg.num_classes = 4;  // dividers, pedestrian crossings, boundaries, background
    cfg.range = {-15.0, 15.0, -30.0, 30.0, -2.0, 2.0};
    cfg.ap_xy_projection = true;
  } else {
    throw InvalidConfig("unknown mode '" + mode + "' (expected openlane or argoverse2)");
  }
  return cfg;
}

namespace {

ParamMode param_mode_from_string(const std::string& s) {
  if (s == "chord") return ParamMode::kChord;
  if (s == "uniform") return ParamMode::kUniform;
  throw InvalidConfig("config: param_mode must be 'chord' or 'uniform'");
}

PrIntegration pr_integration_from_string(const std::string& s) {
  if (s == "all_point") return PrIntegration::kAllPoint;
  if (s == "eleven_point") return PrIntegration::kElevenPoint;
  throw InvalidConfig("config: pr_integration must be 'all_point' or 'eleven_point'");
}

}  // namespace

ToolConfig load_config(const std::string& path, const ToolConfig& base) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config: " + path + ": " + e.what());
  }

  ToolConfig cfg = base;
  try {
    if (j.contains("mode")) cfg = ToolConfig::preset(j.at("mode").get<std::string>());
    if (j.contains("keypoints")) cfg.keypoints = j.at("keypoints").get<int>();
    if (j.contains("control_points")) cfg.control_points = j.at("control_points").get<int>();
    if (j.contains("num_classes")) cfg.num_classes = j.at("num_classes").get<int>();
    if (j.contains("poly_degree")) cfg.poly_degree = j.at("poly_degree").get<int>();
    if (j.contains("param_mode"))
      cfg.param_mode = param_mode_from_string(j.at("param_mode").get<std::string>());
    if (j.contains("eval_samples")) cfg.eval_samples = j.at("eval_samples").get<int>();
    if (j.contains("ap_xy_projection"))
      cfg.ap_xy_projection = j.at("ap_xy_projection").get<bool>();
    if (j.contains("pr_integration"))
      cfg.pr_integration = pr_integration_from_string(j.at("pr_integration").get<std::string>());
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      if (w.contains("position")) cfg.weights.position = w.at("position").get<double>();
      if (w.contains("shape")) cfg.weights.shape = w.at("shape").get<double>();
      if (w.contains("smoothness")) cfg.weights.smoothness = w.at("smoothness").get<double>();
      if (w.contains("bezier")) cfg.weights.bezier = w.at("bezier").get<double>();
      if (w.contains("class")) cfg.weights.cls = w.at("class").get<double>();
    }
    if (j.contains("focal")) {
      const auto& f = j.at("focal");
      if (f.contains("alpha")) cfg.focal.alpha = f.at("alpha").get<double>();
      if (f.contains("gamma")) cfg.focal.gamma = f.at("gamma").get<double>();
    }
    if (j.contains("match")) {
      const auto& m = j.at("match");
      if (m.contains("point_dist_thresh"))
        cfg.criteria.point_dist_thresh = m.at("point_dist_thresh").get<double>();
      if (m.contains("min_matched_fraction"))
        cfg.criteria.min_matched_fraction = m.at("min_matched_fraction").get<double>();
      if (m.contains("confidence_thresh"))
        cfg.criteria.confidence_thresh = m.at("confidence_thresh").get<double>();
    }
    if (j.contains("chamfer_thresholds"))
      cfg.chamfer_thresholds = j.at("chamfer_thresholds").get<std::vector<double>>();
    if (j.contains("perception_range")) {
      const auto& r = j.at("perception_range");
      cfg.range.x_min = r.at("x").at(0).get<double>();
      cfg.range.x_max = r.at("x").at(1).get<double>();
      cfg.range.y_min = r.at("y").at(0).get<double>();
      cfg.range.y_max = r.at("y").at(1).get<double>();
      cfg.range.z_min = r.at("z").at(0).get<double>();
      cfg.range.z_max = r.at("z").at(1).get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError("config: " + path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ToolConfig& cfg) {
  json j;
  j["mode"] = cfg.mode;
  j["keypoints"] = cfg.keypoints;
  j["control_points"] = cfg.control_points;
  j["num_classes"] = cfg.num_classes;
  j["poly_degree"] = cfg.poly_degree;
  j["param_mode"] = cfg.param_mode == ParamMode::kChord ? "chord" : "uniform";
  j["eval_samples"] = cfg.eval_samples;
  j["ap_xy_projection"] = cfg.ap_xy_projection;
  j["pr_integration"] =
      cfg.pr_integration == PrIntegration::kAllPoint ? "all_point" : "eleven_point";
  j["weights"] = {{"position", cfg.weights.position},
                  {"shape", cfg.weights.shape},
                  {"smoothness", cfg.weights.smoothness},
                  {"bezier", cfg.weights.bezier},
                  {"class", cfg.weights.cls}};
  j["focal"] = {{"alpha", cfg.focal.alpha}, {"gamma", cfg.focal.gamma}};
  j["match"] = {{"point_dist_thresh", cfg.criteria.point_dist_thresh},
                {"min_matched_fraction", cfg.criteria.min_matched_fraction},
                {"confidence_thresh", cfg.criteria.confidence_thresh}};
  j["chamfer_thresholds"] = cfg.chamfer_thresholds;
  j["perception_range"] = {{"x", {cfg.range.x_min, cfg.range.x_max}},
                           {"y", {cfg.range.y_min, cfg.range.y_max}},
                           {"z", {cfg.range.z_min, cfg.range.z_max}}};
  return j.dump();
}

}  // namespace lanekit
