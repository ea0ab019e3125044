// CLI command entry points. Each command validates its inputs fully before
// writing anything, builds its machine-readable report in memory, and writes
// it in one shot, so failures never leave partial output files.
#pragma once

#include <cstdint>
#include <string>

#include "lanekit/config.hpp"

namespace lanekit {

void cmd_synth(const ToolConfig& cfg, const std::string& output, const std::string& kind,
               int frames, double noise_sigma, std::uint64_t seed);

// Fits every lane to the joint representation (P_k key points + P_c control
// points) and reports per-lane residuals and modeling errors.
void cmd_fit(const ToolConfig& cfg, const std::string& input, const std::string& output);

// Runs the five-term matching between prediction and ground-truth frames:
// reports the optimal assignment, per-pair term breakdowns and the loss.
void cmd_match(const ToolConfig& cfg, const std::string& pred_path,
               const std::string& gt_path, const std::string& output);

// Surround-view to front-view transform; optionally applies the perception
// range filter afterwards.
void cmd_transform(const ToolConfig& cfg, const std::string& input,
                   const std::string& output, bool apply_range);

// Full evaluation (F-Score, Chamfer-AP, category accuracy) of predictions
// against ground truth; writes JSON and prints a text summary.
void cmd_eval(const ToolConfig& cfg, const std::string& pred_path, const std::string& gt_path,
              const std::string& output);

// Per-lane modeling error of the polynomial baseline, interpolation, and
// Bézier fits, with the Simple/Complex scene split; optionally dumps sampled
// curves as CSV for plotting.
void cmd_compare_models(const ToolConfig& cfg, const std::string& input,
                        const std::string& output, const std::string& curves_csv);

}  // namespace lanekit
