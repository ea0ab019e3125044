// Five-term lane matching: bounding-box position, point-wise shape,
// curvature smoothness, Bézier control-point, and focal-loss class costs,
// assembled into a frame cost matrix and solved as an optimal assignment.
// The post-assignment loss reuses the same terms and weights.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "lanekit/core.hpp"
#include "lanekit/lane.hpp"

namespace lanekit {

template <typename Scalar>
struct PredictedLane {
  KeyPointLane<Scalar> keypoints;
  BezierLane<Scalar> controls;
  ClassScores<Scalar> scores;
};

template <typename Scalar>
struct GroundTruthLane {
  KeyPointLane<Scalar> keypoints;
  BezierLane<Scalar> controls;
  int class_id = 0;
  bool is_padding = false;  // geometry ignored; class is background
};

template <typename Scalar>
struct Box6 {
  Scalar x_min, y_min, z_min, x_max, y_max, z_max;
};

// Weights of the five matching-cost terms.
template <typename Scalar>
struct CostWeights {
  Scalar position = 1;
  Scalar shape = 1;
  Scalar smoothness = 1;
  Scalar bezier = 1;
  Scalar cls = 1;
};

template <typename Scalar>
struct FocalParams {
  Scalar alpha = Scalar(0.25);
  Scalar gamma = Scalar(2);
};

struct Assignment {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;  // (pred, gt), sorted by pred
  double total_cost = 0;
};

// Axis-aligned bounds of a point sequence.
template <typename Derived>
Box6<typename Derived::Scalar> bounds_of(const Eigen::MatrixBase<Derived>& pts) {
  using S = typename Derived::Scalar;
  const auto lo = pts.colwise().minCoeff();
  const auto hi = pts.colwise().maxCoeff();
  return Box6<S>{lo(0), lo(1), lo(2), hi(0), hi(1), hi(2)};
}

template <typename Scalar>
Box6<Scalar> bbox_of(const KeyPointLane<Scalar>& lane) {
  if (lane.points.rows() == 0) throw EmptyInput("bbox_of: empty lane");
  return bounds_of(lane.points);
}

// Mean absolute difference over the six bounding-box components.
template <typename Scalar>
Scalar cost_position(const KeyPointLane<Scalar>& pred, const KeyPointLane<Scalar>& gt) {
  const Box6<Scalar> a = bbox_of(pred);
  const Box6<Scalar> b = bbox_of(gt);
  return (std::abs(a.x_min - b.x_min) + std::abs(a.y_min - b.y_min) +
          std::abs(a.z_min - b.z_min) + std::abs(a.x_max - b.x_max) +
          std::abs(a.y_max - b.y_max) + std::abs(a.z_max - b.z_max)) /
         Scalar(6);
}

// Mean Euclidean distance over index-aligned key points.
template <typename Scalar>
Scalar cost_shape(const KeyPointLane<Scalar>& pred, const KeyPointLane<Scalar>& gt) {
  if (pred.points.rows() != gt.points.rows())
    throw ShapeMismatch("cost_shape: point counts differ");
  return (pred.points - gt.points).rowwise().norm().mean();
}

// Central-difference tangents T_j = P_{j+1} - P_{j-1}, unnormalized.
// Row r holds the tangent at point index r+1.
template <typename Scalar>
Points<Scalar> tangents(const KeyPointLane<Scalar>& lane) {
  const Eigen::Index n = lane.points.rows();
  if (n < 3) throw TooFewPoints("tangents: need at least 3 points");
  Points<Scalar> out(n - 2, 3);
  for (Eigen::Index j = 1; j + 1 < n; ++j)
    out.row(j - 1) = lane.points.row(j + 1) - lane.points.row(j - 1);
  return out;
}

// Local curvature estimate |T_j - T_{j-1}| / |P_j - P_{j-1}| for the
// interior indices where both tangents exist (j in [2, n-2]); entry r holds
// the estimate at point index r+2. Segments shorter than the coincidence
// tolerance contribute 0 and bump the optional counter.
template <typename Scalar>
VectorX<Scalar> curvature(const KeyPointLane<Scalar>& lane, int* degenerate_segments = nullptr) {
  const Eigen::Index n = lane.points.rows();
  if (n < 4) throw TooFewPoints("curvature: need at least 4 points");
  const Points<Scalar> tang = tangents(lane);
  VectorX<Scalar> out(n - 3);
  for (Eigen::Index j = 2; j + 1 < n; ++j) {
    const Scalar seg = (lane.points.row(j) - lane.points.row(j - 1)).norm();
    if (seg < Scalar(kCoincidentTol)) {
      out[j - 2] = 0;
      if (degenerate_segments) ++*degenerate_segments;
    } else {
      out[j - 2] = (tang.row(j - 1) - tang.row(j - 2)).norm() / seg;
    }
  }
  return out;
}

// Mean absolute curvature difference over the realizable interior indices.
template <typename Scalar>
Scalar cost_smoothness(const KeyPointLane<Scalar>& pred, const KeyPointLane<Scalar>& gt) {
  if (pred.points.rows() != gt.points.rows())
    throw ShapeMismatch("cost_smoothness: point counts differ");
  return (curvature(pred) - curvature(gt)).cwiseAbs().mean();
}

// Mean Euclidean distance over index-aligned control points.
template <typename Scalar>
Scalar cost_bezier(const BezierLane<Scalar>& pred, const BezierLane<Scalar>& gt) {
  if (pred.controls.rows() != gt.controls.rows())
    throw ShapeMismatch("cost_bezier: control counts differ");
  return (pred.controls - gt.controls).rowwise().norm().mean();
}

// Focal loss on the probability assigned to the target class.
template <typename Scalar>
Scalar cost_class(const ClassScores<Scalar>& pred, int gt_class,
                  const FocalParams<Scalar>& focal = {}) {
  if (gt_class < 0 || gt_class >= pred.probs.size())
    throw InvalidClass("cost_class: class index out of range");
  const Scalar pt = std::max(pred.probs[gt_class], Scalar(1e-7));
  return -focal.alpha * std::pow(Scalar(1) - pt, focal.gamma) * std::log(pt);
}

// Pads the ground-truth list to length target with no-object entries.
template <typename Scalar>
std::vector<GroundTruthLane<Scalar>> pad_ground_truth(std::vector<GroundTruthLane<Scalar>> gts,
                                                      std::size_t target,
                                                      int background_class) {
  if (gts.size() > target)
    throw TooManyGroundTruths("pad_ground_truth: more ground truths than slots");
  while (gts.size() < target) {
    GroundTruthLane<Scalar> pad;
    pad.class_id = background_class;
    pad.is_padding = true;
    gts.push_back(std::move(pad));
  }
  return gts;
}

template <typename Scalar>
struct PairCost {
  Scalar position = 0, shape = 0, smoothness = 0, bezier = 0, cls = 0;
  Scalar weighted = 0;
};

// One cost-matrix entry with its term breakdown. Padded ground truths
// contribute only the class term, scored against the background class.
template <typename Scalar>
PairCost<Scalar> pair_cost(const PredictedLane<Scalar>& pred, const GroundTruthLane<Scalar>& gt,
                           const CostWeights<Scalar>& w, const FocalParams<Scalar>& focal = {}) {
  PairCost<Scalar> c;
  c.cls = cost_class(pred.scores, gt.class_id, focal);
  if (!gt.is_padding) {
    c.position = cost_position(pred.keypoints, gt.keypoints);
    c.shape = cost_shape(pred.keypoints, gt.keypoints);
    c.smoothness = cost_smoothness(pred.keypoints, gt.keypoints);
    c.bezier = cost_bezier(pred.controls, gt.controls);
  }
  c.weighted = w.position * c.position + w.shape * c.shape + w.smoothness * c.smoothness +
               w.bezier * c.bezier + w.cls * c.cls;
  return c;
}

template <typename Scalar>
MatrixX<Scalar> cost_matrix(const std::vector<PredictedLane<Scalar>>& preds,
                            const std::vector<GroundTruthLane<Scalar>>& gts_padded,
                            const CostWeights<Scalar>& w,
                            const FocalParams<Scalar>& focal = {}) {
  if (preds.size() != gts_padded.size())
    throw ShapeMismatch("cost_matrix: prediction and ground-truth counts differ");
  MatrixX<Scalar> cost(preds.size(), gts_padded.size());
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t k = 0; k < gts_padded.size(); ++k)
      cost(i, k) = pair_cost(preds[i], gts_padded[k], w, focal).weighted;
  return cost;
}

// Exact minimum-cost assignment on a square matrix (shortest augmenting
// path with potentials, O(n^3)). Deterministic: rows are introduced in
// order, so equal-cost optima resolve to the first one reached.
template <typename Scalar>
Assignment hungarian(const MatrixX<Scalar>& cost) {
  const Eigen::Index n = cost.rows();
  if (n == 0 || cost.cols() != n) throw InvalidMatrix("hungarian: matrix not square");
  if (!cost.allFinite()) throw InvalidMatrix("hungarian: non-finite entry");

  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<Eigen::Index> match(n + 1, 0), way(n + 1, 0);  // 1-based columns

  for (Eigen::Index i = 1; i <= n; ++i) {
    match[0] = i;
    Eigen::Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = match[j0];
      Scalar delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.pairs.resize(n);
  for (Eigen::Index j = 1; j <= n; ++j) out.pairs[match[j] - 1] = {match[j] - 1, j - 1};
  double total = 0;
  for (const auto& [i, j] : out.pairs) total += static_cast<double>(cost(i, j));
  out.total_cost = total;
  return out;
}

template <typename Scalar>
struct LossBreakdown {
  Scalar position = 0, shape = 0, smoothness = 0, bezier = 0, cls = 0;
  Scalar total = 0;  // sum of weighted per-pair costs
};

// Post-assignment loss: the matching-cost terms accumulated over the
// assigned pairs with unchanged weights, so the total reproduces the
// assignment's matching cost.
template <typename Scalar>
LossBreakdown<Scalar> total_loss(const std::vector<PredictedLane<Scalar>>& preds,
                                 const std::vector<GroundTruthLane<Scalar>>& gts_padded,
                                 const Assignment& assignment, const CostWeights<Scalar>& w,
                                 const FocalParams<Scalar>& focal = {}) {
  if (preds.size() != gts_padded.size())
    throw ShapeMismatch("total_loss: prediction and ground-truth counts differ");
  const std::size_t n = preds.size();
  if (assignment.pairs.size() != n)
    throw InvalidAssignment("total_loss: assignment size mismatch");
  std::vector<char> pred_seen(n, 0), gt_seen(n, 0);
  for (const auto& [i, k] : assignment.pairs) {
    if (i < 0 || k < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(k) >= n)
      throw InvalidAssignment("total_loss: index out of range");
    if (pred_seen[i]++ || gt_seen[k]++)
      throw InvalidAssignment("total_loss: duplicate index in assignment");
  }

  LossBreakdown<Scalar> loss;
  for (const auto& [i, k] : assignment.pairs) {
    const PairCost<Scalar> c = pair_cost(preds[i], gts_padded[k], w, focal);
    loss.position += c.position;
    loss.shape += c.shape;
    loss.smoothness += c.smoothness;
    loss.bezier += c.bezier;
    loss.cls += c.cls;
    loss.total += c.weighted;
  }
  return loss;
}

}  // namespace lanekit
