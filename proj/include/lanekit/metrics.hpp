// Evaluation protocol: Chamfer distance between lane polylines, confidence
// gated F-Score, Chamfer-AP over a set of distance thresholds, and category
// accuracy over geometry-matched pairs.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "lanekit/core.hpp"
#include "lanekit/lane.hpp"

namespace lanekit {

template <typename Scalar>
Scalar point_segment_distance(const Vec3<Scalar>& p, const Vec3<Scalar>& a,
                              const Vec3<Scalar>& b) {
  const Vec3<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 <= Scalar(0)) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
  return (p - a - t * ab).norm();
}

// Distance from a point to the nearest location on a polyline (its segments,
// not just its vertices). A single-point polyline degenerates to the point.
template <typename Scalar>
Scalar distance_to_polyline(const Vec3<Scalar>& p, const Points<Scalar>& poly) {
  if (poly.rows() == 0) throw EmptyInput("distance_to_polyline: empty polyline");
  if (poly.rows() == 1) return (p - poly.row(0).transpose()).norm();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i + 1 < poly.rows(); ++i) {
    best = std::min(best, point_segment_distance<Scalar>(p, poly.row(i).transpose(),
                                                         poly.row(i + 1).transpose()));
  }
  return best;
}

// Symmetric mean nearest distance between two polylines:
//   0.5 * (mean_a dist(a_i, B) + mean_b dist(b_j, A)).
template <typename Scalar>
Scalar chamfer_distance(const Points<Scalar>& a, const Points<Scalar>& b) {
  if (a.rows() == 0 || b.rows() == 0) throw EmptyInput("chamfer_distance: empty polyline");
  Scalar sum_a = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    sum_a += distance_to_polyline<Scalar>(a.row(i).transpose(), b);
  Scalar sum_b = 0;
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    sum_b += distance_to_polyline<Scalar>(b.row(j).transpose(), a);
  return Scalar(0.5) * (sum_a / Scalar(a.rows()) + sum_b / Scalar(b.rows()));
}

template <typename Scalar>
Scalar chamfer_distance(const KeyPointLane<Scalar>& a, const KeyPointLane<Scalar>& b) {
  return chamfer_distance(a.points, b.points);
}

template <typename Scalar>
struct MatchCriteria {
  Scalar point_dist_thresh = Scalar(1.5);     // meters
  Scalar min_matched_fraction = Scalar(0.75); // fraction of aligned points
  Scalar confidence_thresh = Scalar(0.25);    // strict: kept iff conf > thresh
};

template <typename Scalar>
struct EvalPrediction {
  KeyPointLane<Scalar> lane;
  ClassScores<Scalar> scores;
};

template <typename Scalar>
struct EvalFrame {
  std::vector<EvalPrediction<Scalar>> predictions;
  std::vector<KeyPointLane<Scalar>> ground_truths;  // class_id carried on the lane
};

template <typename Scalar>
struct EvalResult {
  long long tp = 0, fp = 0, fn = 0;
  Scalar precision = 0, recall = 0, f_score = 0;
  std::map<int, Scalar> ap_per_class;
  Scalar mean_ap = 0;
  Scalar category_accuracy = 0;
  bool zero_tp = false;  // set when category accuracy had no TP pairs
};

// True iff at least min_matched_fraction of index-aligned point pairs lie
// within point_dist_thresh of each other.
template <typename Scalar>
bool lane_is_tp(const KeyPointLane<Scalar>& pred, const KeyPointLane<Scalar>& gt,
                const MatchCriteria<Scalar>& crit) {
  if (pred.points.rows() != gt.points.rows())
    throw ShapeMismatch("lane_is_tp: point counts differ");
  Eigen::Index within = 0;
  for (Eigen::Index i = 0; i < pred.points.rows(); ++i) {
    if ((pred.points.row(i) - gt.points.row(i)).norm() <= crit.point_dist_thresh) ++within;
  }
  return Scalar(within) / Scalar(pred.points.rows()) >= crit.min_matched_fraction;
}

namespace detail {

template <typename Scalar>
struct FrameMatch {
  long long tp = 0, fp = 0, fn = 0;
  std::vector<std::pair<std::size_t, std::size_t>> tp_pairs;  // (pred idx, gt idx)
};

// Confidence-gates predictions, then pairs them to ground truths one-to-one
// in ascending Chamfer order; a claimed pair counts as TP iff it passes the
// point-wise criteria.
template <typename Scalar>
FrameMatch<Scalar> match_frame(const EvalFrame<Scalar>& frame,
                               const MatchCriteria<Scalar>& crit) {
  FrameMatch<Scalar> out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < frame.predictions.size(); ++i) {
    if (frame.predictions[i].scores.confidence() > crit.confidence_thresh) kept.push_back(i);
  }
  const std::size_t n_gt = frame.ground_truths.size();

  std::vector<std::tuple<Scalar, std::size_t, std::size_t>> cands;
  cands.reserve(kept.size() * n_gt);
  for (std::size_t a = 0; a < kept.size(); ++a) {
    for (std::size_t j = 0; j < n_gt; ++j) {
      cands.emplace_back(chamfer_distance(frame.predictions[kept[a]].lane.points,
                                          frame.ground_truths[j].points),
                         a, j);
    }
  }
  std::sort(cands.begin(), cands.end());

  std::vector<char> pred_used(kept.size(), 0), gt_used(n_gt, 0);
  for (const auto& [d, a, j] : cands) {
    if (pred_used[a] || gt_used[j]) continue;
    pred_used[a] = gt_used[j] = 1;
    if (lane_is_tp(frame.predictions[kept[a]].lane, frame.ground_truths[j], crit)) {
      ++out.tp;
      out.tp_pairs.emplace_back(kept[a], j);
    }
  }
  out.fp = static_cast<long long>(kept.size()) - out.tp;
  out.fn = static_cast<long long>(n_gt) - out.tp;
  return out;
}

template <typename Scalar>
Points<Scalar> xy_projected(const Points<Scalar>& pts) {
  Points<Scalar> out = pts;
  out.col(2).setZero();
  return out;
}

}  // namespace detail

// Frame-set F-Score; fills the counting half of EvalResult.
template <typename Scalar>
EvalResult<Scalar> f_score(const std::vector<EvalFrame<Scalar>>& frames,
                           const MatchCriteria<Scalar>& crit) {
  EvalResult<Scalar> res;
  for (const auto& frame : frames) {
    const auto m = detail::match_frame(frame, crit);
    res.tp += m.tp;
    res.fp += m.fp;
    res.fn += m.fn;
  }
  res.precision = (res.tp + res.fp) > 0 ? Scalar(res.tp) / Scalar(res.tp + res.fp) : Scalar(0);
  res.recall = (res.tp + res.fn) > 0 ? Scalar(res.tp) / Scalar(res.tp + res.fn) : Scalar(0);
  res.f_score = (res.precision + res.recall) > Scalar(0)
                    ? Scalar(2) * res.precision * res.recall / (res.precision + res.recall)
                    : Scalar(0);
  return res;
}

struct CategoryAccuracy {
  double value = 0;
  bool zero_tp = false;
};

// Fraction of geometry-matched TP pairs whose predicted class equals the
// ground-truth class. Zero TP yields 0 with the diagnostic flag set.
template <typename Scalar>
CategoryAccuracy category_accuracy(const std::vector<EvalFrame<Scalar>>& frames,
                                   const MatchCriteria<Scalar>& crit) {
  long long tp = 0, correct = 0;
  for (const auto& frame : frames) {
    const auto m = detail::match_frame(frame, crit);
    tp += m.tp;
    for (const auto& [pi, gj] : m.tp_pairs) {
      if (frame.predictions[pi].scores.argmax_foreground() ==
          frame.ground_truths[gj].class_id)
        ++correct;
    }
  }
  if (tp == 0) return {0.0, true};
  return {static_cast<double>(correct) / static_cast<double>(tp), false};
}

// Precision-recall curve integration rule.
enum class PrIntegration { kAllPoint, kElevenPoint };

// Chamfer-threshold AP for one class: predictions of the class are ranked by
// confidence; each greedily claims the nearest unclaimed same-class ground
// truth within the threshold. AP_mu is the area under the precision-recall
// curve; the result is the mean over thresholds.
template <typename Scalar>
Scalar average_precision(const std::vector<EvalFrame<Scalar>>& frames, int class_id,
                         const std::vector<Scalar>& thresholds, bool xy_projection = false,
                         PrIntegration integration = PrIntegration::kAllPoint) {
  if (thresholds.empty()) throw InvalidConfig("average_precision: no thresholds");

  struct Cand {
    Scalar conf;
    std::size_t frame;
    std::size_t pred;
  };
  std::vector<Cand> cands;
  std::vector<std::vector<std::size_t>> gt_idx(frames.size());  // same-class gts per frame
  long long total_gt = 0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t j = 0; j < frames[f].ground_truths.size(); ++j) {
      if (frames[f].ground_truths[j].class_id == class_id) {
        gt_idx[f].push_back(j);
        ++total_gt;
      }
    }
    for (std::size_t i = 0; i < frames[f].predictions.size(); ++i) {
      const auto& s = frames[f].predictions[i].scores;
      if (s.argmax_foreground() == class_id) cands.push_back({s.confidence(), f, i});
    }
  }
  if (total_gt == 0) return Scalar(0);
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.conf != b.conf) return a.conf > b.conf;
    return std::tie(a.frame, a.pred) < std::tie(b.frame, b.pred);
  });

  // Pairwise distances, computed once and reused across thresholds.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Scalar>> dist;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const auto& frame = frames[cands[c].frame];
    const auto pred_pts =
        xy_projection ? detail::xy_projected(frame.predictions[cands[c].pred].lane.points)
                      : frame.predictions[cands[c].pred].lane.points;
    std::vector<Scalar> row;
    row.reserve(gt_idx[cands[c].frame].size());
    for (std::size_t j : gt_idx[cands[c].frame]) {
      const auto gt_pts = xy_projection
                              ? detail::xy_projected(frame.ground_truths[j].points)
                              : frame.ground_truths[j].points;
      row.push_back(chamfer_distance(pred_pts, gt_pts));
    }
    dist[{cands[c].frame, cands[c].pred}] = std::move(row);
  }

  Scalar ap_sum = 0;
  for (const Scalar mu : thresholds) {
    std::vector<std::vector<char>> claimed(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) claimed[f].assign(gt_idx[f].size(), 0);

    std::vector<char> is_tp(cands.size(), 0);
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const auto& row = dist[{cands[c].frame, cands[c].pred}];
      Scalar best = std::numeric_limits<Scalar>::infinity();
      std::size_t best_j = 0;
      bool found = false;
      for (std::size_t r = 0; r < row.size(); ++r) {
        if (!claimed[cands[c].frame][r] && row[r] < best) {
          best = row[r];
          best_j = r;
          found = true;
        }
      }
      if (found && best <= mu) {
        is_tp[c] = 1;
        claimed[cands[c].frame][best_j] = 1;
      }
    }

    // Precision/recall at every rank, with the precision envelope made
    // monotone from the right.
    std::vector<Scalar> prec(cands.size()), rec(cands.size());
    long long tp = 0;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (is_tp[c]) ++tp;
      prec[c] = Scalar(tp) / Scalar(c + 1);
      rec[c] = Scalar(tp) / Scalar(total_gt);
    }
    for (std::size_t c = cands.size(); c-- > 1;) prec[c - 1] = std::max(prec[c - 1], prec[c]);

    Scalar ap = 0;
    if (integration == PrIntegration::kAllPoint) {
      Scalar prev_rec = 0;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        ap += (rec[c] - prev_rec) * prec[c];
        prev_rec = rec[c];
      }
    } else {
      // Mean interpolated precision at recalls 0, 0.1, ..., 1.
      for (int step = 0; step <= 10; ++step) {
        const Scalar r = Scalar(step) / Scalar(10);
        Scalar p = 0;
        for (std::size_t c = 0; c < cands.size(); ++c) {
          if (rec[c] >= r) {
            p = prec[c];
            break;
          }
        }
        ap += p / Scalar(11);
      }
    }
    ap_sum += ap;
  }
  return ap_sum / Scalar(thresholds.size());
}

// Full evaluation: F-Score counts, per-class AP over the configured
// thresholds (classes taken from the ground truth), and category accuracy.
template <typename Scalar>
EvalResult<Scalar> evaluate(const std::vector<EvalFrame<Scalar>>& frames,
                            const MatchCriteria<Scalar>& crit,
                            const std::vector<Scalar>& thresholds,
                            bool ap_xy_projection = false,
                            PrIntegration integration = PrIntegration::kAllPoint) {
  EvalResult<Scalar> res = f_score(frames, crit);

  std::vector<int> classes;
  for (const auto& frame : frames)
    for (const auto& gt : frame.ground_truths) classes.push_back(gt.class_id);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  Scalar ap_sum = 0;
  for (int c : classes) {
    const Scalar ap = average_precision(frames, c, thresholds, ap_xy_projection, integration);
    res.ap_per_class[c] = ap;
    ap_sum += ap;
  }
  res.mean_ap = classes.empty() ? Scalar(0) : ap_sum / Scalar(classes.size());

  const auto cat = category_accuracy(frames, crit);
  res.category_accuracy = Scalar(cat.value);
  res.zero_tp = cat.zero_tp;
  return res;
}

}  // namespace lanekit
