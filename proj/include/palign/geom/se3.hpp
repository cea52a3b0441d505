#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace palign {

// so(3) / se(3) maps used by the pose parameterization.
//
// Twist layout: xi = (rho, phi) with rho the translational part and phi the
// rotational part, so xi.head<3>() is meters and xi.tail<3>() is radians.

template <typename S>
Eigen::Matrix<S, 3, 3> skew(const Eigen::Matrix<S, 3, 1>& v) {
  Eigen::Matrix<S, 3, 3> m;
  m << S(0), -v.z(), v.y(),
       v.z(), S(0), -v.x(),
      -v.y(), v.x(), S(0);
  return m;
}

template <typename S>
Eigen::Matrix<S, 3, 3> exp_so3(const Eigen::Matrix<S, 3, 1>& phi) {
  const S theta2 = phi.squaredNorm();
  const Eigen::Matrix<S, 3, 3> a = skew(phi);
  if (theta2 < S(1e-16)) {
    // 2nd-order Taylor keeps the result orthonormal to machine precision.
    return Eigen::Matrix<S, 3, 3>::Identity() + a + a * a * S(0.5);
  }
  const S theta = std::sqrt(theta2);
  return Eigen::Matrix<S, 3, 3>::Identity() + (std::sin(theta) / theta) * a +
         ((S(1) - std::cos(theta)) / theta2) * a * a;
}

template <typename S>
Eigen::Matrix<S, 3, 1> log_so3(const Eigen::Matrix<S, 3, 3>& r) {
  Eigen::AngleAxis<S> aa(r);
  return aa.angle() * aa.axis();
}

// Left Jacobian of SO(3): Exp(phi) t for SE(3) exp uses J_l(phi) rho.
template <typename S>
Eigen::Matrix<S, 3, 3> left_jacobian_so3(const Eigen::Matrix<S, 3, 1>& phi) {
  const S theta2 = phi.squaredNorm();
  const Eigen::Matrix<S, 3, 3> a = skew(phi);
  if (theta2 < S(1e-16)) {
    return Eigen::Matrix<S, 3, 3>::Identity() + a * S(0.5) + a * a / S(6);
  }
  const S theta = std::sqrt(theta2);
  return Eigen::Matrix<S, 3, 3>::Identity() +
         ((S(1) - std::cos(theta)) / theta2) * a +
         ((theta - std::sin(theta)) / (theta2 * theta)) * a * a;
}

template <typename S>
Eigen::Matrix<S, 3, 3> inv_left_jacobian_so3(const Eigen::Matrix<S, 3, 1>& phi) {
  const S theta2 = phi.squaredNorm();
  const Eigen::Matrix<S, 3, 3> a = skew(phi);
  if (theta2 < S(1e-16)) {
    return Eigen::Matrix<S, 3, 3>::Identity() - a * S(0.5) + a * a / S(12);
  }
  const S theta = std::sqrt(theta2);
  const S half = theta / S(2);
  const S cot = half / std::tan(half);
  return Eigen::Matrix<S, 3, 3>::Identity() - a * S(0.5) +
         ((S(1) - cot) / theta2) * a * a;
}

template <typename S>
void exp_se3(const Eigen::Matrix<S, 6, 1>& xi, Eigen::Matrix<S, 3, 3>& r,
             Eigen::Matrix<S, 3, 1>& t) {
  const Eigen::Matrix<S, 3, 1> rho = xi.template head<3>();
  const Eigen::Matrix<S, 3, 1> phi = xi.template tail<3>();
  r = exp_so3(phi);
  t = left_jacobian_so3(phi) * rho;
}

template <typename S>
Eigen::Matrix<S, 6, 1> log_se3(const Eigen::Matrix<S, 3, 3>& r,
                               const Eigen::Matrix<S, 3, 1>& t) {
  Eigen::Matrix<S, 6, 1> xi;
  const Eigen::Matrix<S, 3, 1> phi = log_so3(r);
  xi.template tail<3>() = phi;
  xi.template head<3>() = inv_left_jacobian_so3(phi) * t;
  return xi;
}

}  // namespace palign
