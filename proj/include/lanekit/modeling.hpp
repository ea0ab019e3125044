// Converts variable-length annotated lanes into fixed-scale representations:
// least-squares Bézier control points, arc-length interpolated key points,
// and the X-Y / Z-Y polynomial baseline used for modeling comparisons.
#pragma once

#include <cmath>
#include <vector>

#include "lanekit/core.hpp"
#include "lanekit/lane.hpp"
#include "lanekit/metrics.hpp"

namespace lanekit {

// Curve parameterization for the fit's design matrix. Chord length follows
// the cumulative arc length of the annotated points; uniform spaces the
// parameters by index regardless of point spacing.
enum class ParamMode { kChord, kUniform };

// Normalized cumulative arc-length parameter per annotated point:
// strictly increasing, 0 at the first point and 1 at the last.
template <typename Scalar>
VectorX<Scalar> chord_length_params(const AnnotatedLane<Scalar>& lane) {
  validate_lane(lane);
  VectorX<Scalar> cum = cumulative_lengths(lane.points);
  const Scalar total = cum[cum.size() - 1];
  if (total < Scalar(kCoincidentTol))
    throw DegenerateLane("chord_length_params: lane has zero length");
  VectorX<Scalar> t = cum / total;
  t[0] = 0;
  t[t.size() - 1] = 1;
  return t;
}

template <typename Scalar>
VectorX<Scalar> curve_params(const AnnotatedLane<Scalar>& lane, ParamMode mode) {
  if (mode == ParamMode::kChord) return chord_length_params(lane);
  validate_lane(lane);
  return VectorX<Scalar>::LinSpaced(lane.points.rows(), Scalar(0), Scalar(1));
}

namespace detail {

// Bernstein basis row for a degree-n curve at parameter t.
template <typename Scalar>
VectorX<Scalar> bernstein_row(int degree, Scalar t) {
  VectorX<Scalar> row(degree + 1);
  Scalar binom = 1;
  for (int j = 0; j <= degree; ++j) {
    row[j] = binom * std::pow(Scalar(1) - t, Scalar(degree - j)) * std::pow(t, Scalar(j));
    binom = binom * Scalar(degree - j) / Scalar(j + 1);
  }
  return row;
}

}  // namespace detail

// Design matrix of Bernstein basis values: row i evaluates the degree
// (control_count - 1) basis at params[i]. Rows sum to 1.
template <typename Scalar>
MatrixX<Scalar> bernstein_design_matrix(const VectorX<Scalar>& params,
                                        Eigen::Index control_count) {
  if (control_count < 2)
    throw InvalidConfig("bernstein_design_matrix: need at least 2 control points");
  MatrixX<Scalar> design(params.size(), control_count);
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    if (!(params[i] >= Scalar(0) && params[i] <= Scalar(1)))
      throw OutOfDomain("bernstein_design_matrix: parameter outside [0,1]");
    design.row(i) = detail::bernstein_row(static_cast<int>(control_count) - 1, params[i]);
  }
  return design;
}

template <typename Scalar>
struct BezierFitResult {
  BezierLane<Scalar> lane;
  Scalar residual_rms = 0;     // sqrt(mean squared point residual)
  bool rank_deficient = false; // solved via minimum-norm solution
};

// Least-squares Bézier fit: the control points minimizing the squared
// residual between the curve at the lane's parameters and the annotated
// points, solved independently per axis.
template <typename Scalar>
BezierFitResult<Scalar> fit_bezier(const AnnotatedLane<Scalar>& lane,
                                   Eigen::Index control_count,
                                   ParamMode mode = ParamMode::kChord) {
  const VectorX<Scalar> params = curve_params(lane, mode);
  if (lane.points.rows() < control_count)
    throw InsufficientPoints("fit_bezier: fewer annotated points than control points");
  const MatrixX<Scalar> design = bernstein_design_matrix(params, control_count);

  Eigen::CompleteOrthogonalDecomposition<MatrixX<Scalar>> cod(design);
  BezierFitResult<Scalar> out;
  out.lane.controls = cod.solve(lane.points);
  out.lane.class_id = lane.class_id;
  out.rank_deficient = cod.rank() < control_count;
  out.residual_rms = std::sqrt((design * out.lane.controls - lane.points).squaredNorm() /
                               Scalar(lane.points.rows()));
  return out;
}

// Curve point at parameter t as the Bernstein-weighted sum of controls.
template <typename Scalar>
Vec3<Scalar> eval_bezier(const BezierLane<Scalar>& curve, Scalar t) {
  if (!(t >= Scalar(0) && t <= Scalar(1)))
    throw OutOfDomain("eval_bezier: t outside [0,1]");
  const VectorX<Scalar> basis =
      detail::bernstein_row(static_cast<int>(curve.controls.rows()) - 1, t);
  return curve.controls.transpose() * basis;
}

// n curve samples at uniform parameters t = i/(n-1).
template <typename Scalar>
KeyPointLane<Scalar> sample_bezier(const BezierLane<Scalar>& curve, Eigen::Index n) {
  if (n < 2) throw InvalidConfig("sample_bezier: need at least 2 samples");
  KeyPointLane<Scalar> out;
  out.class_id = curve.class_id;
  out.points.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    out.points.row(i) = eval_bezier(curve, Scalar(i) / Scalar(n - 1)).transpose();
  return out;
}

template <typename Scalar>
Vec3<Scalar> lerp_point(const Vec3<Scalar>& a, const Vec3<Scalar>& b, Scalar t) {
  return (Scalar(1) - t) * a + t * b;
}

// Resamples the polyline to n points at uniform arc-length fractions; the
// endpoints are carried over exactly.
template <typename Scalar>
KeyPointLane<Scalar> resample_keypoints(const AnnotatedLane<Scalar>& lane, Eigen::Index n) {
  validate_lane(lane);
  if (n < 2) throw InvalidConfig("resample_keypoints: need at least 2 points");
  const VectorX<Scalar> cum = cumulative_lengths(lane.points);
  const Scalar total = cum[cum.size() - 1];
  if (total < Scalar(kCoincidentTol))
    throw DegenerateLane("resample_keypoints: lane has zero length");

  KeyPointLane<Scalar> out;
  out.class_id = lane.class_id;
  out.points.resize(n, 3);
  out.points.row(0) = lane.points.row(0);
  out.points.row(n - 1) = lane.points.row(lane.points.rows() - 1);

  Eigen::Index seg = 0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const Scalar target = total * Scalar(i) / Scalar(n - 1);
    while (seg + 2 < lane.points.rows() && cum[seg + 1] < target) ++seg;
    const Scalar seg_len = cum[seg + 1] - cum[seg];
    const Scalar t = seg_len > Scalar(0) ? (target - cum[seg]) / seg_len : Scalar(0);
    out.points.row(i) =
        lerp_point<Scalar>(lane.points.row(seg).transpose(),
                           lane.points.row(seg + 1).transpose(), t)
            .transpose();
  }
  return out;
}

template <typename Scalar>
struct PolyFitResult {
  PolyBaselineLane<Scalar> lane;
  bool rank_deficient = false;
};

// Baseline model: independent least-squares fits of X and Z as polynomials
// in Y (ascending coefficients). Rank-deficient systems (e.g. all points at
// one Y) fall back to the minimum-norm solution instead of failing.
template <typename Scalar>
PolyFitResult<Scalar> fit_polynomial_baseline(const AnnotatedLane<Scalar>& lane, int degree) {
  validate_lane(lane);
  if (degree < 0) throw InvalidConfig("fit_polynomial_baseline: negative degree");
  if (lane.points.rows() < degree + 1)
    throw InsufficientPoints("fit_polynomial_baseline: fewer points than coefficients");

  MatrixX<Scalar> vand(lane.points.rows(), degree + 1);
  for (Eigen::Index i = 0; i < lane.points.rows(); ++i) {
    Scalar p = 1;
    for (int d = 0; d <= degree; ++d) {
      vand(i, d) = p;
      p *= lane.points(i, 1);
    }
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixX<Scalar>> cod(vand);
  PolyFitResult<Scalar> out;
  out.lane.degree = degree;
  out.lane.coeffs_xy = cod.solve(lane.points.col(0));
  out.lane.coeffs_zy = cod.solve(lane.points.col(2));
  out.rank_deficient = cod.rank() < degree + 1;
  return out;
}

template <typename Scalar>
Scalar eval_polynomial(const VectorX<Scalar>& coeffs, Scalar y) {
  Scalar acc = 0;
  for (Eigen::Index d = coeffs.size(); d-- > 0;) acc = acc * y + coeffs[d];
  return acc;
}

// Renders the polynomial baseline as a polyline over [y0, y1].
template <typename Scalar>
KeyPointLane<Scalar> sample_polynomial(const PolyBaselineLane<Scalar>& model, Scalar y0,
                                       Scalar y1, Eigen::Index n, int class_id = 0) {
  if (n < 2) throw InvalidConfig("sample_polynomial: need at least 2 samples");
  KeyPointLane<Scalar> out;
  out.class_id = class_id;
  out.points.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar y = y0 + (y1 - y0) * Scalar(i) / Scalar(n - 1);
    out.points(i, 0) = eval_polynomial(model.coeffs_xy, y);
    out.points(i, 1) = y;
    out.points(i, 2) = eval_polynomial(model.coeffs_zy, y);
  }
  return out;
}

// Symmetric Chamfer distance between a model polyline and the annotated lane.
template <typename Scalar>
Scalar modeling_error(const KeyPointLane<Scalar>& model_points,
                      const AnnotatedLane<Scalar>& lane) {
  return chamfer_distance(model_points.points, lane.points);
}

enum class SceneComplexity { kSimple, kComplex };

// A frame is Complex iff any lane has a segment whose X-Y direction deviates
// more than 45 degrees from the longitudinal axis, i.e. |dx| > |dy|. The
// comparison is direction-agnostic so annotation order does not matter;
// exact ties classify Simple.
template <typename Scalar>
SceneComplexity classify_complexity(const std::vector<AnnotatedLane<Scalar>>& frame) {
  if (frame.empty()) throw EmptyInput("classify_complexity: empty frame");
  for (const auto& lane : frame) {
    for (Eigen::Index i = 0; i + 1 < lane.points.rows(); ++i) {
      const Scalar dx = std::abs(lane.points(i + 1, 0) - lane.points(i, 0));
      const Scalar dy = std::abs(lane.points(i + 1, 1) - lane.points(i, 1));
      if (dx > dy) return SceneComplexity::kComplex;
    }
  }
  return SceneComplexity::kSimple;
}

// Builds the joint representation used as ground truth: P_k key points and
// P_c Bézier control points for the same lane.
template <typename Scalar>
JointLane<Scalar> make_joint_lane(const AnnotatedLane<Scalar>& lane, Eigen::Index keypoints,
                                  Eigen::Index control_count,
                                  ParamMode mode = ParamMode::kChord) {
  JointLane<Scalar> out;
  out.keypoints = resample_keypoints(lane, keypoints);
  out.controls = fit_bezier(lane, control_count, mode).lane;
  out.class_id = lane.class_id;
  return out;
}

}  // namespace lanekit
