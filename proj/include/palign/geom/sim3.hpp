#pragma once

#include <Eigen/Core>

#include "palign/geom/pose.hpp"

namespace palign {

// Similarity transform x -> s R x + t. Used for trajectory alignment and for
// expressing the gauge freedom of the alignment energy.
struct Sim3 {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const {
    return scale * (rotation * x) + translation;
  }

  Sim3 inverse() const {
    Sim3 inv;
    inv.scale = 1.0 / scale;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation) / scale;
    return inv;
  }

  // Action on a world-from-camera pose: the new pose maps *scaled* camera
  // coordinates into the transformed world, (R, t) -> (R0 R, s R0 t + t0).
  Pose apply(const Pose& p) const {
    return Pose(rotation * p.rotation(), apply(p.translation()));
  }
};

}  // namespace palign
