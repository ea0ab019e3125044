#include "lanekit/commands.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lanekit/parallel.hpp"
#include "lanekit/synth.hpp"

namespace lanekit {

namespace {

using nlohmann::json;

json config_json(const ToolConfig& cfg) { return json::parse(config_to_json(cfg)); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

json points_json(const Pointsd& pts) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    arr.push_back({pts(i, 0), pts(i, 1), pts(i, 2)});
  return arr;
}

struct FittedLane {
  KeyPointLane<double> keypoints;
  BezierFitResult<double> bezier;
  bool densified = false;  // lane had fewer points than needed for the fit
};

// Joint-representation pipeline for one lane. Lanes with fewer annotated
// points than the fit needs are densified by arc-length resampling first,
// which keeps short two-point lanes usable; the report flags them.
FittedLane fit_lane(const AnnotatedLane<double>& lane, const ToolConfig& cfg) {
  FittedLane out;
  out.keypoints = resample_keypoints(lane, cfg.keypoints);
  out.densified = lane.points.rows() < cfg.control_points;
  if (out.densified) {
    const auto dense =
        resample_keypoints(lane, std::max<Eigen::Index>(cfg.control_points, cfg.keypoints));
    out.bezier = fit_bezier(AnnotatedLane<double>{dense.points, lane.class_id},
                            cfg.control_points, cfg.param_mode);
  } else {
    out.bezier = fit_bezier(lane, cfg.control_points, cfg.param_mode);
  }
  return out;
}

std::string meta_line(const ToolConfig& cfg, const std::string& command) {
  json meta;
  meta["type"] = "meta";
  meta["command"] = command;
  meta["config"] = config_json(cfg);
  return meta.dump();
}

}  // namespace

void cmd_synth(const ToolConfig& cfg, const std::string& output, const std::string& kind,
               int frames, double noise_sigma, std::uint64_t seed) {
  cfg.validate();
  const auto generated = synth_frames(frames, kind, noise_sigma, seed);
  io::save_frames(output, generated);
  std::cout << "wrote " << generated.size() << " frame(s) to " << output << "\n";
}

void cmd_fit(const ToolConfig& cfg, const std::string& input, const std::string& output) {
  cfg.validate();
  io::LoadDiagnostics diag;
  const auto frames = io::load_frames(input, cfg.num_classes, &diag);
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";

  std::vector<std::string> lines(frames.size());
  parallel_for(frames.size(), [&](std::size_t f) {
    json rec;
    rec["type"] = "frame";
    rec["frame_id"] = frames[f].frame_id;
    json lanes = json::array();
    for (const auto& lane_rec : frames[f].lanes) {
      const auto lane = io::to_annotated(lane_rec);
      const FittedLane fit = fit_lane(lane, cfg);
      json lj;
      lj["class_id"] = lane.class_id;
      lj["keypoints"] = points_json(fit.keypoints.points);
      lj["controls"] = points_json(fit.bezier.lane.controls);
      lj["residual_rms"] = fit.bezier.residual_rms;
      lj["rank_deficient"] = fit.bezier.rank_deficient;
      lj["densified"] = fit.densified;
      lj["err_interp"] = modeling_error(fit.keypoints, lane);
      lj["err_bezier"] =
          modeling_error(sample_bezier(fit.bezier.lane, cfg.eval_samples), lane);
      lanes.push_back(std::move(lj));
    }
    rec["lanes"] = std::move(lanes);
    lines[f] = rec.dump();
  });

  std::ostringstream buf;
  buf << meta_line(cfg, "fit") << '\n';
  for (const auto& line : lines) buf << line << '\n';
  write_file(output, buf.str());
  std::cout << "fitted " << frames.size() << " frame(s) to " << output << "\n";
}

void cmd_transform(const ToolConfig& cfg, const std::string& input, const std::string& output,
                   bool apply_range) {
  cfg.validate();
  io::LoadDiagnostics diag;
  const auto frames = io::load_frames(input, cfg.num_classes, &diag);
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";

  std::vector<io::LaneFileFrame> transformed(frames.size());
  parallel_for(frames.size(), [&](std::size_t f) {
    const auto& frame = frames[f];
    if (!frame.camera)
      throw InvalidRig("transform: frame '" + frame.frame_id + "' has no camera rig");
    std::vector<AnnotatedLane<double>> lanes;
    std::vector<const io::LaneRecord*> sources;
    for (const auto& rec : frame.lanes) {
      lanes.push_back(io::to_annotated(rec));
      sources.push_back(&rec);
    }

    io::LaneFileFrame out;
    out.frame_id = frame.frame_id;
    out.camera = frame.camera;
    // Transform per source lane so split segments keep their record fields.
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      std::vector<AnnotatedLane<double>> piece{lanes[i]};
      auto visible = surround_to_frontview(piece, *frame.camera);
      if (apply_range) visible = range_filter_3d(visible, cfg.range);
      for (auto& part : visible) {
        io::LaneRecord rec;
        rec.points = part.points;
        rec.class_id = part.class_id;
        rec.confidence = sources[i]->confidence;
        rec.scores = sources[i]->scores;
        out.lanes.push_back(std::move(rec));
      }
    }
    transformed[f] = std::move(out);
  });

  std::ostringstream buf;
  for (const auto& frame : transformed) buf << io::frame_to_json_line(frame) << '\n';
  write_file(output, buf.str());
  std::cout << "transformed " << frames.size() << " frame(s) to " << output << "\n";
}

namespace {

// Pairs prediction and ground-truth files by frame id: ground-truth order
// first, prediction-only frames afterwards in file order.
std::vector<std::pair<const io::LaneFileFrame*, const io::LaneFileFrame*>> pair_frames(
    const std::vector<io::LaneFileFrame>& preds, const std::vector<io::LaneFileFrame>& gts) {
  std::map<std::string, const io::LaneFileFrame*> pred_by_id;
  for (const auto& p : preds) pred_by_id[p.frame_id] = &p;
  std::vector<std::pair<const io::LaneFileFrame*, const io::LaneFileFrame*>> pairs;
  for (const auto& g : gts) {
    const auto it = pred_by_id.find(g.frame_id);
    pairs.emplace_back(it == pred_by_id.end() ? nullptr : it->second, &g);
    if (it != pred_by_id.end()) pred_by_id.erase(it);
  }
  for (const auto& p : preds) {
    if (pred_by_id.count(p.frame_id)) pairs.emplace_back(&p, nullptr);
  }
  return pairs;
}

}  // namespace

void cmd_eval(const ToolConfig& cfg, const std::string& pred_path, const std::string& gt_path,
              const std::string& output) {
  cfg.validate();
  io::LoadDiagnostics diag;
  const auto preds = io::load_frames(pred_path, cfg.num_classes, &diag);
  const auto gts = io::load_frames(gt_path, cfg.num_classes, &diag);
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";

  const auto pairs = pair_frames(preds, gts);
  std::vector<EvalFrame<double>> frames(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t f) {
    EvalFrame<double>& frame = frames[f];
    if (pairs[f].first) {
      for (const auto& rec : pairs[f].first->lanes) {
        EvalPrediction<double> p;
        p.lane = resample_keypoints(io::to_annotated(rec), cfg.keypoints);
        p.scores = io::record_scores(rec, cfg.num_classes);
        frame.predictions.push_back(std::move(p));
      }
    }
    if (pairs[f].second) {
      for (const auto& rec : pairs[f].second->lanes)
        frame.ground_truths.push_back(resample_keypoints(io::to_annotated(rec), cfg.keypoints));
    }
  });

  const EvalResult<double> res = evaluate(frames, cfg.criteria, cfg.chamfer_thresholds,
                                          cfg.ap_xy_projection, cfg.pr_integration);

  json out;
  out["config"] = config_json(cfg);
  out["frames"] = frames.size();
  out["tp"] = res.tp;
  out["fp"] = res.fp;
  out["fn"] = res.fn;
  out["precision"] = res.precision;
  out["recall"] = res.recall;
  out["f_score"] = res.f_score;
  json ap = json::object();
  for (const auto& [cls, v] : res.ap_per_class) ap[std::to_string(cls)] = v;
  out["ap_per_class"] = std::move(ap);
  out["map"] = res.mean_ap;
  out["category_accuracy"] = res.category_accuracy;
  out["zero_tp"] = res.zero_tp;
  write_file(output, out.dump(2) + "\n");

  std::cout << "frames evaluated : " << frames.size() << "\n"
            << "TP / FP / FN     : " << res.tp << " / " << res.fp << " / " << res.fn << "\n"
            << "precision        : " << res.precision << "\n"
            << "recall           : " << res.recall << "\n"
            << "F-Score          : " << res.f_score << "\n"
            << "mAP              : " << res.mean_ap << "\n"
            << "category accuracy: " << res.category_accuracy
            << (res.zero_tp ? "  (no TP pairs)" : "") << "\n";
}

void cmd_match(const ToolConfig& cfg, const std::string& pred_path, const std::string& gt_path,
               const std::string& output) {
  cfg.validate();
  io::LoadDiagnostics diag;
  const auto pred_frames = io::load_frames(pred_path, cfg.num_classes, &diag);
  const auto gt_frames = io::load_frames(gt_path, cfg.num_classes, &diag);
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";

  const auto pairs = pair_frames(pred_frames, gt_frames);
  for (const auto& [p, g] : pairs) {
    if (!p && g)
      throw TooManyGroundTruths("match: frame '" + g->frame_id +
                                "' has ground truths but no predictions");
  }

  std::vector<std::string> lines(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t f) {
    const auto& pf = *pairs[f].first;
    std::vector<PredictedLane<double>> preds;
    for (const auto& rec : pf.lanes) {
      const auto lane = io::to_annotated(rec);
      const FittedLane fit = fit_lane(lane, cfg);
      preds.push_back({fit.keypoints, fit.bezier.lane, io::record_scores(rec, cfg.num_classes)});
    }
    std::vector<GroundTruthLane<double>> gts;
    if (pairs[f].second) {
      for (const auto& rec : pairs[f].second->lanes) {
        const auto lane = io::to_annotated(rec);
        const FittedLane fit = fit_lane(lane, cfg);
        gts.push_back({fit.keypoints, fit.bezier.lane, lane.class_id, false});
      }
    }
    if (gts.size() > preds.size())
      throw TooManyGroundTruths("match: frame '" + pf.frame_id + "' has " +
                                std::to_string(gts.size()) + " ground truths for " +
                                std::to_string(preds.size()) + " predictions");
    const auto padded = pad_ground_truth(std::move(gts), preds.size(), cfg.background_class());

    const auto cost = cost_matrix(preds, padded, cfg.weights, cfg.focal);
    const Assignment assignment = hungarian(cost);
    const auto loss = total_loss(preds, padded, assignment, cfg.weights, cfg.focal);

    json rec;
    rec["type"] = "frame";
    rec["frame_id"] = pf.frame_id;
    json pj = json::array();
    for (const auto& [i, k] : assignment.pairs) {
      const auto c = pair_cost(preds[i], padded[k], cfg.weights, cfg.focal);
      json e;
      e["pred"] = i;
      e["gt"] = k;
      e["is_padding"] = padded[k].is_padding;
      e["cost"] = c.weighted;
      e["terms"] = {{"position", c.position},
                    {"shape", c.shape},
                    {"smoothness", c.smoothness},
                    {"bezier", c.bezier},
                    {"class", c.cls}};
      pj.push_back(std::move(e));
    }
    rec["pairs"] = std::move(pj);
    rec["total_cost"] = assignment.total_cost;
    rec["loss"] = {{"position", loss.position}, {"shape", loss.shape},
                   {"smoothness", loss.smoothness}, {"bezier", loss.bezier},
                   {"class", loss.cls},           {"total", loss.total}};
    lines[f] = rec.dump();
  });

  std::ostringstream buf;
  buf << meta_line(cfg, "match") << '\n';
  for (const auto& line : lines) buf << line << '\n';
  write_file(output, buf.str());
  std::cout << "matched " << pairs.size() << " frame(s) to " << output << "\n";
}

void cmd_compare_models(const ToolConfig& cfg, const std::string& input,
                        const std::string& output, const std::string& curves_csv) {
  cfg.validate();
  io::LoadDiagnostics diag;
  const auto frames = io::load_frames(input, cfg.num_classes, &diag);
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";

  struct LaneReport {
    std::string frame_id;
    std::size_t lane_index;
    std::string complexity;
    double err_poly, err_interp, err_bezier;
    bool poly_rank_deficient;
  };
  std::vector<std::vector<LaneReport>> reports(frames.size());
  std::vector<std::string> curves(frames.size());

  parallel_for(frames.size(), [&](std::size_t f) {
    const auto& frame = frames[f];
    std::vector<AnnotatedLane<double>> lanes;
    for (const auto& rec : frame.lanes) lanes.push_back(io::to_annotated(rec));
    if (lanes.empty()) return;
    const auto complexity = classify_complexity(lanes);
    const std::string cplx =
        complexity == SceneComplexity::kComplex ? "complex" : "simple";

    std::ostringstream csv;
    for (std::size_t li = 0; li < lanes.size(); ++li) {
      const auto& lane = lanes[li];
      const FittedLane fit = fit_lane(lane, cfg);
      const auto bezier_samples = sample_bezier(fit.bezier.lane, cfg.eval_samples);

      // The polynomial baseline also gets densified input if too short.
      AnnotatedLane<double> poly_src = lane;
      if (lane.points.rows() < cfg.poly_degree + 1) {
        poly_src.points =
            resample_keypoints(lane, std::max<Eigen::Index>(cfg.poly_degree + 1, cfg.keypoints))
                .points;
      }
      const auto poly = fit_polynomial_baseline(poly_src, cfg.poly_degree);
      const double y0 = lane.points.col(1).minCoeff();
      const double y1 = lane.points.col(1).maxCoeff();
      const auto poly_samples =
          y1 - y0 > kCoincidentTol
              ? sample_polynomial(poly.lane, y0, y1, cfg.eval_samples, lane.class_id)
              : sample_polynomial(poly.lane, y0 - 0.5, y1 + 0.5, cfg.eval_samples,
                                  lane.class_id);

      LaneReport rep;
      rep.frame_id = frame.frame_id;
      rep.lane_index = li;
      rep.complexity = cplx;
      rep.err_interp = modeling_error(fit.keypoints, lane);
      rep.err_bezier = modeling_error(bezier_samples, lane);
      rep.err_poly = modeling_error(poly_samples, lane);
      rep.poly_rank_deficient = poly.rank_deficient;
      reports[f].push_back(rep);

      if (!curves_csv.empty()) {
        const auto emit = [&](const char* model, const Pointsd& pts) {
          for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            csv << frame.frame_id << ',' << li << ',' << model << ',' << i << ','
                << pts(i, 0) << ',' << pts(i, 1) << ',' << pts(i, 2) << '\n';
          }
        };
        emit("annotated", lane.points);
        emit("interpolation", fit.keypoints.points);
        emit("bezier", bezier_samples.points);
        emit("polynomial", poly_samples.points);
      }
    }
    curves[f] = csv.str();
  });

  // Aggregate the Simple/Complex split.
  std::map<std::string, std::array<double, 3>> sums;
  std::map<std::string, int> counts;
  std::ostringstream buf;
  buf << meta_line(cfg, "compare-models") << '\n';
  for (const auto& frame_reports : reports) {
    for (const auto& rep : frame_reports) {
      json rec;
      rec["type"] = "lane";
      rec["frame_id"] = rep.frame_id;
      rec["lane_index"] = rep.lane_index;
      rec["complexity"] = rep.complexity;
      rec["err_polynomial"] = rep.err_poly;
      rec["err_interpolation"] = rep.err_interp;
      rec["err_bezier"] = rep.err_bezier;
      rec["poly_rank_deficient"] = rep.poly_rank_deficient;
      buf << rec.dump() << '\n';
      auto& s = sums[rep.complexity];
      s[0] += rep.err_poly;
      s[1] += rep.err_interp;
      s[2] += rep.err_bezier;
      ++counts[rep.complexity];
    }
  }
  for (const auto& [cplx, s] : sums) {
    const double n = counts[cplx];
    json rec;
    rec["type"] = "summary";
    rec["complexity"] = cplx;
    rec["lanes"] = counts[cplx];
    rec["mean_err_polynomial"] = s[0] / n;
    rec["mean_err_interpolation"] = s[1] / n;
    rec["mean_err_bezier"] = s[2] / n;
    buf << rec.dump() << '\n';
  }
  write_file(output, buf.str());

  if (!curves_csv.empty()) {
    std::ostringstream all;
    all << "frame_id,lane,model,point,x,y,z\n";
    for (const auto& c : curves) all << c;
    write_file(curves_csv, all.str());
  }
  std::cout << "compared models over " << frames.size() << " frame(s) to " << output << "\n";
}

}  // namespace lanekit
