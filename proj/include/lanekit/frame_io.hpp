// Line-delimited frame files: one JSON object per line carrying a frame id,
// its lanes (points, class, optional scores/confidence for predictions) and
// an optional camera rig. See docs/format.md for the schema.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lanekit/core.hpp"
#include "lanekit/lane.hpp"
#include "lanekit/projection.hpp"

namespace lanekit::io {

struct LaneRecord {
  Pointsd points;
  int class_id = 0;
  std::optional<double> confidence;          // prediction files
  std::optional<Eigen::VectorXd> scores;     // prediction files, length = num_classes
};

struct LaneFileFrame {
  std::string frame_id;
  std::vector<LaneRecord> lanes;
  std::optional<CameraRig<double>> camera;
};

struct LoadDiagnostics {
  int collapsed_points = 0;                  // consecutive duplicates dropped
  std::vector<std::string> warnings;
};

// Parses and validates a frame file. Malformed lines or invariant
// violations fail with the offending line / frame / lane named.
std::vector<LaneFileFrame> load_frames(const std::string& path, int num_classes,
                                       LoadDiagnostics* diag = nullptr);

void save_frames(const std::string& path, const std::vector<LaneFileFrame>& frames);

std::string frame_to_json_line(const LaneFileFrame& frame);

AnnotatedLane<double> to_annotated(const LaneRecord& rec);

// Class scores for a record: the explicit vector when present, otherwise a
// distribution putting the record's confidence (default 1) on its class and
// the remainder on background.
ClassScores<double> record_scores(const LaneRecord& rec, int num_classes);

}  // namespace lanekit::io
