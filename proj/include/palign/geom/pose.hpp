#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "palign/core/error.hpp"
#include "palign/geom/se3.hpp"

namespace palign {

// Rigid camera pose, world-from-camera: x_world = R * x_cam + t.
// All relative transforms are derived as T_{target<-source} =
// target.inverse() * source.
template <typename S>
class PoseT {
 public:
  using Mat3 = Eigen::Matrix<S, 3, 3>;
  using Vec3 = Eigen::Matrix<S, 3, 1>;
  using Vec6 = Eigen::Matrix<S, 6, 1>;

  PoseT() : r_(Mat3::Identity()), t_(Vec3::Zero()) {}

  PoseT(const Mat3& r, const Vec3& t) : r_(r), t_(t) {
    const S ortho = (r.transpose() * r - Mat3::Identity()).norm();
    if (!(ortho <= S(1e-9)))
      throw bad_data("Pose: rotation not orthonormal (|R'R - I| = " +
                     std::to_string(double(ortho)) + ")");
    if (!(std::abs(r.determinant() - S(1)) <= S(1e-9)))
      throw bad_data("Pose: rotation determinant " +
                     std::to_string(double(r.determinant())) + " != +1");
  }

  static PoseT identity() { return PoseT(); }

  const Mat3& rotation() const { return r_; }
  const Vec3& translation() const { return t_; }

  Vec3 apply(const Vec3& x) const { return r_ * x + t_; }

  PoseT inverse() const {
    PoseT p;
    p.r_ = r_.transpose();
    p.t_ = -(r_.transpose() * t_);
    return p;
  }

  PoseT operator*(const PoseT& rhs) const {
    PoseT p;
    p.r_ = r_ * rhs.r_;
    p.t_ = r_ * rhs.t_ + t_;
    return p;
  }

  // Left retraction: Exp(xi) * pose. The rotation is re-projected through a
  // unit quaternion so repeated retractions do not drift off the manifold.
  PoseT retract(const Vec6& xi) const {
    Mat3 dr;
    Vec3 dt;
    exp_se3(xi, dr, dt);
    PoseT p;
    p.r_ = Eigen::Quaternion<S>(dr * r_).normalized().toRotationMatrix();
    p.t_ = dr * t_ + dt;
    return p;
  }

  // Twist xi with this = Exp(xi) * ref, inverse of retract at ref.
  Vec6 local_twist(const PoseT& ref) const {
    const PoseT delta = *this * ref.inverse();
    return log_se3<S>(delta.r_, delta.t_);
  }

 private:
  Mat3 r_;
  Vec3 t_;
};

using Pose = PoseT<double>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

}  // namespace palign
