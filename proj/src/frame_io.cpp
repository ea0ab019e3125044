#include "lanekit/frame_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lanekit::io {

using nlohmann::json;

namespace {

json points_to_json(const Pointsd& pts) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    arr.push_back({pts(i, 0), pts(i, 1), pts(i, 2)});
  return arr;
}

Pointsd points_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty())
    throw ParseError(where + ": 'points' must be a non-empty array");
  Pointsd pts(arr.size(), 3);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& p = arr[i];
    if (!p.is_array() || p.size() != 3)
      throw ParseError(where + ": point " + std::to_string(i) + " must be [x,y,z]");
    for (int c = 0; c < 3; ++c) {
      const double v = p[c].get<double>();
      if (!std::isfinite(v))
        throw ParseError(where + ": point " + std::to_string(i) + " has non-finite coordinate");
      pts(i, c) = v;
    }
  }
  return pts;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index nr, Eigen::Index nc,
                                 const std::string& where) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != nr)
    throw ParseError(where + ": expected " + std::to_string(nr) + " rows");
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != nc)
      throw ParseError(where + ": expected " + std::to_string(nc) + " columns");
    for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

LaneFileFrame frame_from_json(const json& j, int num_classes, const std::string& where,
                              LoadDiagnostics* diag) {
  LaneFileFrame frame;
  if (!j.contains("frame_id") || !j.at("frame_id").is_string())
    throw ParseError(where + ": missing string 'frame_id'");
  frame.frame_id = j.at("frame_id").get<std::string>();
  const std::string ctx = where + " (frame '" + frame.frame_id + "')";

  if (!j.contains("lanes") || !j.at("lanes").is_array())
    throw ParseError(ctx + ": missing 'lanes' array");
  std::size_t idx = 0;
  for (const auto& lj : j.at("lanes")) {
    const std::string lane_ctx = ctx + " lane " + std::to_string(idx);
    LaneRecord rec;
    rec.points = points_from_json(lj.at("points"), lane_ctx);
    rec.class_id = lj.value("class_id", 0);
    if (rec.class_id < 0 || rec.class_id >= num_classes)
      throw ParseError(lane_ctx + ": class_id " + std::to_string(rec.class_id) +
                       " outside [0," + std::to_string(num_classes - 1) + "]");
    if (lj.contains("confidence")) {
      const double c = lj.at("confidence").get<double>();
      if (!(c >= 0.0 && c <= 1.0)) throw ParseError(lane_ctx + ": confidence outside [0,1]");
      rec.confidence = c;
    }
    if (lj.contains("scores")) {
      const auto& sj = lj.at("scores");
      if (!sj.is_array() || static_cast<int>(sj.size()) != num_classes)
        throw ParseError(lane_ctx + ": 'scores' must have num_classes entries");
      Eigen::VectorXd s(num_classes);
      for (int k = 0; k < num_classes; ++k) s[k] = sj[k].get<double>();
      ClassScores<double> scores{s};
      try {
        validate_scores(scores);
      } catch (const Error& e) {
        throw ParseError(lane_ctx + ": " + e.what());
      }
      rec.scores = std::move(s);
    }

    // Collapse duplicates, then enforce the lane invariants.
    AnnotatedLane<double> lane{rec.points, rec.class_id};
    const int collapsed = collapse_duplicate_points(lane);
    if (collapsed > 0) {
      if (diag) {
        diag->collapsed_points += collapsed;
        diag->warnings.push_back(lane_ctx + ": collapsed " + std::to_string(collapsed) +
                                 " duplicate point(s)");
      }
      rec.points = lane.points;
    }
    try {
      validate_lane(lane, lane_ctx);
    } catch (const Error& e) {
      throw ParseError(e.what());
    }
    frame.lanes.push_back(std::move(rec));
    ++idx;
  }

  if (j.contains("camera")) {
    const auto& cj = j.at("camera");
    CameraRig<double> rig;
    rig.intrinsic = matrix_from_json(cj.at("intrinsic"), 3, 3, ctx + " camera intrinsic");
    rig.extrinsic = matrix_from_json(cj.at("extrinsic"), 4, 4, ctx + " camera extrinsic");
    rig.image_h = cj.at("image_h").get<int>();
    rig.image_w = cj.at("image_w").get<int>();
    try {
      validate_rig(rig);
    } catch (const Error& e) {
      throw ParseError(ctx + ": camera: " + e.what());
    }
    frame.camera = rig;
  }
  return frame;
}

}  // namespace

std::string frame_to_json_line(const LaneFileFrame& frame) {
  json j;
  j["frame_id"] = frame.frame_id;
  json lanes = json::array();
  for (const auto& rec : frame.lanes) {
    json lj;
    lj["class_id"] = rec.class_id;
    lj["points"] = points_to_json(rec.points);
    if (rec.confidence) lj["confidence"] = *rec.confidence;
    if (rec.scores) {
      json s = json::array();
      for (Eigen::Index k = 0; k < rec.scores->size(); ++k) s.push_back((*rec.scores)[k]);
      lj["scores"] = std::move(s);
    }
    lanes.push_back(std::move(lj));
  }
  j["lanes"] = std::move(lanes);
  if (frame.camera) {
    j["camera"] = {{"intrinsic", matrix_to_json(frame.camera->intrinsic)},
                   {"extrinsic", matrix_to_json(frame.camera->extrinsic)},
                   {"image_h", frame.camera->image_h},
                   {"image_w", frame.camera->image_w}};
  }
  return j.dump();
}

std::vector<LaneFileFrame> load_frames(const std::string& path, int num_classes,
                                       LoadDiagnostics* diag) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<LaneFileFrame> frames;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    LaneFileFrame frame = frame_from_json(j, num_classes, where, diag);
    if (!seen_ids.insert(frame.frame_id).second)
      throw ParseError(where + ": duplicate frame_id '" + frame.frame_id + "'");
    frames.push_back(std::move(frame));
  }
  return frames;
}

void save_frames(const std::string& path, const std::vector<LaneFileFrame>& frames) {
  std::ostringstream buf;
  for (const auto& frame : frames) buf << frame_to_json_line(frame) << '\n';
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << buf.str();
}

AnnotatedLane<double> to_annotated(const LaneRecord& rec) {
  return AnnotatedLane<double>{rec.points, rec.class_id};
}

ClassScores<double> record_scores(const LaneRecord& rec, int num_classes) {
  if (rec.scores) return ClassScores<double>{*rec.scores};
  const double conf = rec.confidence.value_or(1.0);
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(num_classes);
  probs[rec.class_id] = conf;
  probs[num_classes - 1] += 1.0 - conf;
  return ClassScores<double>{probs};
}

}  // namespace lanekit::io
