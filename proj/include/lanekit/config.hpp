// Resolved tool configuration: dataset-mode presets, fixed-scale point
// counts, matching weights, and evaluation criteria.
#pragma once

#include <string>
#include <vector>

#include "lanekit/core.hpp"
#include "lanekit/matching.hpp"
#include "lanekit/metrics.hpp"
#include "lanekit/modeling.hpp"
#include "lanekit/projection.hpp"

namespace lanekit {

struct ToolConfig {
  std::string mode = "openlane";
  int keypoints = 20;       // P_k
  int control_points = 5;   // P_c
  int num_classes = 17;     // last index is background
  int poly_degree = 3;
  ParamMode param_mode = ParamMode::kChord;
  CostWeights<double> weights{};
  FocalParams<double> focal{};
  MatchCriteria<double> criteria{};
  std::vector<double> chamfer_thresholds{0.5, 1.0, 1.5};
  PerceptionRange<double> range{-30.0, 30.0, 3.0, 103.0, -10.0, 10.0};
  int eval_samples = 200;       // curve sample count for modeling comparisons
  bool ap_xy_projection = false;  // compute AP on X-Y projections
  PrIntegration pr_integration = PrIntegration::kAllPoint;

  int background_class() const { return num_classes - 1; }

  void validate() const;

  // Dataset presets: "openlane" (Pk 20 / Pc 5, 17 classes, front range) and
  // "argoverse2" (Pk 20 / Pc 10, 4 classes, surround range, 2D AP).
  static ToolConfig preset(const std::string& mode);
};

// Loads a JSON config file on top of the given base (missing keys keep the
// base values) and validates the result.
ToolConfig load_config(const std::string& path, const ToolConfig& base);

// Serializes the fully resolved configuration (for report echoing).
std::string config_to_json(const ToolConfig& cfg);

}  // namespace lanekit
