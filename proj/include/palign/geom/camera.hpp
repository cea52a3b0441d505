#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

#include "palign/geom/grids.hpp"
#include "palign/geom/intrinsics.hpp"
#include "palign/geom/pose.hpp"

namespace palign {

// Back-projects a depth map through a pinhole camera:
//   point(u, v) = ((u - cx) d / fx, (v - cy) d / fy, d).
template <typename S>
PointMapT<S> unproject(const DepthMapT<S>& depth, const Intrinsics& k) {
  if (depth.width() != k.width || depth.height() != k.height)
    throw bad_data("unproject: depth " + shape_str(depth.height(), depth.width()) +
                   " does not match intrinsics " + shape_str(k.height, k.width));
  PointMapT<S> pm(depth.height(), depth.width());
  pm.valid = depth.valid;
  for (Eigen::Index y = 0; y < depth.height(); ++y) {
    for (Eigen::Index x = 0; x < depth.width(); ++x) {
      const S d = depth.values(y, x);
      pm.points.col(pm.index(y, x)) =
          Eigen::Matrix<S, 3, 1>((S(x) - S(k.cx)) * d / S(k.fx),
                                 (S(y) - S(k.cy)) * d / S(k.fy), d);
    }
  }
  return pm;
}

// Pinhole ray direction of a pixel, z normalized to 1.
template <typename S>
Eigen::Matrix<S, 3, 1> pixel_ray(const Intrinsics& k, S u, S v) {
  return {(u - S(k.cx)) / S(k.fx), (v - S(k.cy)) / S(k.fy), S(1)};
}

// Forward projection used by the round-trip checks: a point is written to the
// nearest pixel of its projection; points behind the camera or outside the
// image become invalid.
template <typename S>
DepthMapT<S> project_to_depth(const PointMapT<S>& pm, const Intrinsics& k) {
  DepthMapT<S> depth(pm.height(), pm.width());
  depth.valid.setConstant(false);
  depth.values.setConstant(std::numeric_limits<S>::quiet_NaN());
  for (Eigen::Index y = 0; y < pm.height(); ++y) {
    for (Eigen::Index x = 0; x < pm.width(); ++x) {
      if (!pm.valid(y, x)) continue;
      const Eigen::Matrix<S, 3, 1> p = pm.at(y, x);
      if (!(p.z() > S(0))) continue;
      const S u = S(k.fx) * p.x() / p.z() + S(k.cx);
      const S v = S(k.fy) * p.y() / p.z() + S(k.cy);
      const auto ui = Eigen::Index(std::lround(double(u)));
      const auto vi = Eigen::Index(std::lround(double(v)));
      if (ui < 0 || ui >= pm.width() || vi < 0 || vi >= pm.height()) continue;
      depth.values(vi, ui) = p.z();
      depth.valid(vi, ui) = true;
    }
  }
  return depth;
}

// Rigid map from one camera frame to another, x -> A x + b.
template <typename S>
struct RelativeTransform {
  Eigen::Matrix<S, 3, 3> rotation;
  Eigen::Matrix<S, 3, 1> translation;

  Eigen::Matrix<S, 3, 1> apply(const Eigen::Matrix<S, 3, 1>& x) const {
    return rotation * x + translation;
  }
};

// T_{target<-source} so that apply() maps source-camera coordinates into the
// target camera frame: x_t = R_t' (R_s x + t_s - t_t).
template <typename S>
RelativeTransform<S> relative_transform(const PoseT<S>& source, const PoseT<S>& target) {
  RelativeTransform<S> rel;
  rel.rotation = target.rotation().transpose() * source.rotation();
  rel.translation =
      target.rotation().transpose() * (source.translation() - target.translation());
  return rel;
}

template <typename S>
PointMapT<S> transform_to_view(const PointMapT<S>& pm, const PoseT<S>& source_pose,
                               const PoseT<S>& target_pose) {
  const RelativeTransform<S> rel = relative_transform(source_pose, target_pose);
  PointMapT<S> out = pm;
  out.points = (rel.rotation * pm.points).colwise() + rel.translation;
  return out;
}

// Per-axis affine parameters returned by axis_normalize, enough to invert it.
template <typename S>
struct AxisAffine {
  Eigen::Matrix<S, 3, 1> min = Eigen::Matrix<S, 3, 1>::Zero();
  Eigen::Matrix<S, 3, 1> max = Eigen::Matrix<S, 3, 1>::Zero();

  bool constant_axis(int a) const { return !(max[a] > min[a]); }
};

template <typename S>
struct NormalizeResult {
  PointMapT<S> normalized;
  AxisAffine<S> affine;
};

// Maps each axis of the valid points independently onto [-1, 1]:
//   x -> 2 (x - min) / (max - min) - 1.
// A constant axis maps to 0 everywhere (the midpoint).
template <typename S>
NormalizeResult<S> axis_normalize(const PointMapT<S>& pm) {
  NormalizeResult<S> res;
  res.normalized = pm;
  auto& aff = res.affine;
  aff.min.setConstant(std::numeric_limits<S>::max());
  aff.max.setConstant(std::numeric_limits<S>::lowest());
  Eigen::Index n_valid = 0;
  for (Eigen::Index y = 0; y < pm.height(); ++y) {
    for (Eigen::Index x = 0; x < pm.width(); ++x) {
      if (!pm.valid(y, x)) continue;
      ++n_valid;
      const auto p = pm.at(y, x);
      aff.min = aff.min.cwiseMin(p);
      aff.max = aff.max.cwiseMax(p);
    }
  }
  if (n_valid == 0) throw bad_data("axis_normalize: no valid points");
  for (Eigen::Index y = 0; y < pm.height(); ++y) {
    for (Eigen::Index x = 0; x < pm.width(); ++x) {
      if (!pm.valid(y, x)) continue;
      auto col = res.normalized.points.col(pm.index(y, x));
      for (int a = 0; a < 3; ++a)
        col[a] = aff.constant_axis(a)
                     ? S(0)
                     : S(2) * (col[a] - aff.min[a]) / (aff.max[a] - aff.min[a]) - S(1);
    }
  }
  return res;
}

template <typename S>
PointMapT<S> axis_denormalize(const PointMapT<S>& pm, const AxisAffine<S>& aff) {
  PointMapT<S> out = pm;
  for (Eigen::Index y = 0; y < pm.height(); ++y) {
    for (Eigen::Index x = 0; x < pm.width(); ++x) {
      if (!pm.valid(y, x)) continue;
      auto col = out.points.col(pm.index(y, x));
      for (int a = 0; a < 3; ++a)
        col[a] = aff.constant_axis(a)
                     ? aff.min[a]
                     : (col[a] + S(1)) / S(2) * (aff.max[a] - aff.min[a]) + aff.min[a];
    }
  }
  return out;
}

}  // namespace palign
