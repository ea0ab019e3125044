// Lane representations: variable-length annotated polylines and the two
// fixed-scale forms derived from them (arc-length key points and Bézier
// control points), plus the polynomial baseline used for comparisons.
#pragma once

#include <string>
#include <vector>

#include "lanekit/core.hpp"

namespace lanekit {

// Raw annotated lane: ordered polyline of at least two points, no two
// consecutive points coincident.
template <typename Scalar>
struct AnnotatedLane {
  Points<Scalar> points;
  int class_id = 0;
};

// Lane resampled to a fixed number of points at uniform arc-length
// fractions. Endpoints match the source lane exactly.
template <typename Scalar>
struct KeyPointLane {
  Points<Scalar> points;
  int class_id = 0;
};

// Lane described by a fixed number of Bézier control points
// (degree = rows - 1). Control points are generally not on the curve.
template <typename Scalar>
struct BezierLane {
  Points<Scalar> controls;
  int class_id = 0;
};

// One lane carried in both fixed-scale forms at once.
template <typename Scalar>
struct JointLane {
  KeyPointLane<Scalar> keypoints;
  BezierLane<Scalar> controls;
  int class_id = 0;
};

// X-Y and Z-Y polynomial baseline, coefficients in ascending powers of y.
template <typename Scalar>
struct PolyBaselineLane {
  VectorX<Scalar> coeffs_xy;
  VectorX<Scalar> coeffs_zy;
  int degree = 0;
};

// Per-class probabilities; the last index is the background/no-object class.
template <typename Scalar>
struct ClassScores {
  VectorX<Scalar> probs;

  Eigen::Index num_classes() const { return probs.size(); }
  int background_class() const { return static_cast<int>(probs.size()) - 1; }

  // Predicted foreground class and its probability.
  int argmax_foreground() const {
    int best = 0;
    for (Eigen::Index k = 1; k + 1 < probs.size(); ++k) {
      if (probs[k] > probs[best]) best = static_cast<int>(k);
    }
    return best;
  }
  Scalar confidence() const { return probs[argmax_foreground()]; }
};

template <typename Scalar>
void validate_scores(const ClassScores<Scalar>& s) {
  if (s.probs.size() < 2) throw InvalidClass("class score vector needs at least 2 entries");
  Scalar sum = 0;
  for (Eigen::Index k = 0; k < s.probs.size(); ++k) {
    const Scalar p = s.probs[k];
    if (!(p >= Scalar(0) && p <= Scalar(1)))
      throw InvalidClass("class probability outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - Scalar(1)) > Scalar(1e-6))
    throw InvalidClass("class probabilities do not sum to 1");
}

template <typename Derived>
typename Derived::Scalar polyline_length(const Eigen::MatrixBase<Derived>& pts) {
  typename Derived::Scalar total = 0;
  for (Eigen::Index i = 0; i + 1 < pts.rows(); ++i)
    total += (pts.row(i + 1) - pts.row(i)).norm();
  return total;
}

// Cumulative arc length per vertex; front entry is 0, back is the total.
template <typename Scalar>
VectorX<Scalar> cumulative_lengths(const Points<Scalar>& pts) {
  VectorX<Scalar> cum(pts.rows());
  cum[0] = 0;
  for (Eigen::Index i = 1; i < pts.rows(); ++i)
    cum[i] = cum[i - 1] + (pts.row(i) - pts.row(i - 1)).norm();
  return cum;
}

// Enforces the annotated-lane invariants; `label` names the lane in errors.
template <typename Scalar>
void validate_lane(const AnnotatedLane<Scalar>& lane, const std::string& label = "lane") {
  if (lane.points.rows() < 2)
    throw DegenerateLane(label + ": needs at least 2 points");
  if (!lane.points.allFinite())
    throw DegenerateLane(label + ": non-finite coordinate");
  for (Eigen::Index i = 0; i + 1 < lane.points.rows(); ++i) {
    if ((lane.points.row(i + 1) - lane.points.row(i)).norm() <= Scalar(kCoincidentTol))
      throw DegenerateLane(label + ": consecutive duplicate points at index " +
                           std::to_string(i));
  }
  if (lane.class_id < 0)
    throw InvalidClass(label + ": negative class id");
}

// Drops consecutive points closer than the coincidence tolerance. Returns
// the number of points removed so callers can warn about dirty input.
template <typename Scalar>
int collapse_duplicate_points(AnnotatedLane<Scalar>& lane) {
  if (lane.points.rows() < 2) return 0;
  std::vector<Eigen::Index> keep;
  keep.push_back(0);
  for (Eigen::Index i = 1; i < lane.points.rows(); ++i) {
    if ((lane.points.row(i) - lane.points.row(keep.back())).norm() > Scalar(kCoincidentTol))
      keep.push_back(i);
  }
  const int removed = static_cast<int>(lane.points.rows() - keep.size());
  if (removed > 0) {
    Points<Scalar> kept(keep.size(), 3);
    for (std::size_t r = 0; r < keep.size(); ++r) kept.row(r) = lane.points.row(keep[r]);
    lane.points = std::move(kept);
  }
  return removed;
}

}  // namespace lanekit
