// Pinhole projection and the surround-view to front-view lane transform:
// project each lane point into the image, drop points outside the frustum or
// image bounds, restore survivors to 3D from their retained depth, and split
// lanes at the gaps. Also the 3D perception-range filter.
#pragma once

#include <optional>
#include <vector>

#include "lanekit/core.hpp"
#include "lanekit/lane.hpp"

namespace lanekit {

inline constexpr double kMinDepth = 1e-6;  // meters in front of the camera

template <typename Scalar>
struct CameraRig {
  Eigen::Matrix<Scalar, 3, 3> intrinsic;  // upper-triangular, K(2,2) = 1
  Eigen::Matrix<Scalar, 4, 4> extrinsic;  // rigid ego -> camera
  int image_h = 0;
  int image_w = 0;
};

template <typename Scalar>
struct ProjMatrix {
  Eigen::Matrix<Scalar, 3, 4> m;
};

template <typename Scalar>
struct PixelPoint {
  Scalar u, v, depth;
};

template <typename Scalar>
struct PerceptionRange {
  Scalar x_min, x_max, y_min, y_max, z_min, z_max;

  bool contains(const Vec3<Scalar>& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max &&
           p.z() >= z_min && p.z() <= z_max;
  }
};

template <typename Scalar>
void validate_rig(const CameraRig<Scalar>& rig) {
  const auto& k = rig.intrinsic;
  const Scalar tol = Scalar(1e-6);
  if (!(k(0, 0) > 0 && k(1, 1) > 0)) throw InvalidRig("intrinsic: focal entries must be positive");
  if (std::abs(k(1, 0)) > tol || std::abs(k(2, 0)) > tol || std::abs(k(2, 1)) > tol)
    throw InvalidRig("intrinsic: not upper-triangular");
  if (std::abs(k(2, 2) - Scalar(1)) > tol) throw InvalidRig("intrinsic: K(2,2) must be 1");

  const Eigen::Matrix<Scalar, 3, 3> rot = rig.extrinsic.template topLeftCorner<3, 3>();
  if (((rot.transpose() * rot) - Eigen::Matrix<Scalar, 3, 3>::Identity())
          .cwiseAbs()
          .maxCoeff() > Scalar(1e-6))
    throw InvalidRig("extrinsic: rotation block not orthonormal");
  const Eigen::Matrix<Scalar, 1, 4> bottom = rig.extrinsic.row(3);
  if ((bottom - Eigen::Matrix<Scalar, 1, 4>(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tol)
    throw InvalidRig("extrinsic: bottom row must be [0 0 0 1]");
  if (rig.image_h <= 0 || rig.image_w <= 0) throw InvalidRig("image dimensions must be positive");
}

// M = intrinsic * (top three rows of the extrinsic).
template <typename Scalar>
ProjMatrix<Scalar> compose_projection(const CameraRig<Scalar>& rig) {
  validate_rig(rig);
  ProjMatrix<Scalar> proj;
  proj.m = rig.intrinsic * rig.extrinsic.template topRows<3>();
  if (Eigen::ColPivHouseholderQR<Eigen::Matrix<Scalar, 3, 4>>(proj.m).rank() < 3)
    throw InvalidRig("compose_projection: singular composition");
  return proj;
}

template <typename Scalar>
std::optional<PixelPoint<Scalar>> try_project(const Vec3<Scalar>& p,
                                              const ProjMatrix<Scalar>& proj) {
  const Vec3<Scalar> h = proj.m * p.homogeneous();
  if (!(h(2) > Scalar(kMinDepth))) return std::nullopt;
  return PixelPoint<Scalar>{h(0) / h(2), h(1) / h(2), h(2)};
}

// Homogeneous projection with perspective division; the camera depth is
// retained so the projection stays invertible.
template <typename Scalar>
PixelPoint<Scalar> project_point(const Vec3<Scalar>& p, const ProjMatrix<Scalar>& proj) {
  const auto pix = try_project(p, proj);
  if (!pix) throw BehindCamera("project_point: point at or behind the camera plane");
  return *pix;
}

template <typename Scalar>
bool in_image(Scalar u, Scalar v, int image_h, int image_w) {
  return u >= Scalar(0) && u < Scalar(image_w) && v >= Scalar(0) && v < Scalar(image_h);
}

// Exact inverse of project_point given the retained depth.
template <typename Scalar>
Vec3<Scalar> unproject(const PixelPoint<Scalar>& pix, const CameraRig<Scalar>& rig) {
  const Vec3<Scalar> cam =
      rig.intrinsic.inverse() * Vec3<Scalar>(pix.u * pix.depth, pix.v * pix.depth, pix.depth);
  const Eigen::Matrix<Scalar, 3, 3> rot = rig.extrinsic.template topLeftCorner<3, 3>();
  const Vec3<Scalar> trans = rig.extrinsic.template topRightCorner<3, 1>();
  return rot.transpose() * (cam - trans);
}

namespace detail {

// Splits a lane into maximal runs of kept points; runs shorter than two
// points are discarded. Point order inside a run is preserved.
template <typename Scalar>
void append_runs(const AnnotatedLane<Scalar>& lane, const std::vector<char>& keep,
                 const Points<Scalar>& replacement,
                 std::vector<AnnotatedLane<Scalar>>& out) {
  Eigen::Index start = 0;
  const Eigen::Index n = lane.points.rows();
  while (start < n) {
    while (start < n && !keep[start]) ++start;
    Eigen::Index end = start;
    while (end < n && keep[end]) ++end;
    if (end - start >= 2) {
      AnnotatedLane<Scalar> run;
      run.class_id = lane.class_id;
      run.points = replacement.middleRows(start, end - start);
      out.push_back(std::move(run));
    }
    start = end;
  }
}

}  // namespace detail

// Algorithm: project every point through the rig, drop points behind the
// camera or outside the image, restore the survivors to 3D via their
// retained depth, and split each lane at the dropped gaps.
template <typename Scalar>
std::vector<AnnotatedLane<Scalar>> surround_to_frontview(
    const std::vector<AnnotatedLane<Scalar>>& lanes, const CameraRig<Scalar>& rig) {
  const ProjMatrix<Scalar> proj = compose_projection(rig);
  std::vector<AnnotatedLane<Scalar>> out;
  for (const auto& lane : lanes) {
    const Eigen::Index n = lane.points.rows();
    std::vector<char> keep(n, 0);
    Points<Scalar> restored = lane.points;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto pix = try_project<Scalar>(lane.points.row(i).transpose(), proj);
      if (!pix || !in_image(pix->u, pix->v, rig.image_h, rig.image_w)) continue;
      keep[i] = 1;
      restored.row(i) = unproject(*pix, rig).transpose();
    }
    detail::append_runs(lane, keep, restored, out);
  }
  return out;
}

// Drops points outside the axis-aligned perception box, splitting lanes at
// the gaps like the image filter does.
template <typename Scalar>
std::vector<AnnotatedLane<Scalar>> range_filter_3d(
    const std::vector<AnnotatedLane<Scalar>>& lanes, const PerceptionRange<Scalar>& range) {
  if (!(range.x_min < range.x_max && range.y_min < range.y_max && range.z_min < range.z_max))
    throw InvalidConfig("range_filter_3d: empty perception range");
  std::vector<AnnotatedLane<Scalar>> out;
  for (const auto& lane : lanes) {
    const Eigen::Index n = lane.points.rows();
    std::vector<char> keep(n, 0);
    for (Eigen::Index i = 0; i < n; ++i)
      keep[i] = range.contains(Vec3<Scalar>(lane.points.row(i).transpose()));
    detail::append_runs(lane, keep, lane.points, out);
  }
  return out;
}

}  // namespace lanekit
