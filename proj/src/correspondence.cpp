#include "palign/align/correspondence.hpp"

#include <string>

#include "palign/core/kahan.hpp"
#include "palign/geom/camera.hpp"

namespace palign {

CorrespondenceResult correspondence_residual(const AlignmentState& state,
                                             const CorrespondenceSet& corr,
                                             double lambda, EnergyGradient* grad) {
  CorrespondenceResult res;
  KahanSum sum;
  const int n_frames = state.frame_count();
  for (const Correspondence& c : corr) {
    if (c.frame_a < 0 || c.frame_a >= n_frames || c.frame_b < 0 || c.frame_b >= n_frames)
      throw bad_data("correspondence: frame pair (" + std::to_string(c.frame_a) + ", " +
                     std::to_string(c.frame_b) + ") out of range");
    const DepthMap& da = state.depths[c.frame_a];
    const Intrinsics& ka = state.intrinsics[c.frame_a];
    const Intrinsics& kb = state.intrinsics[c.frame_b];
    if (c.ua < 0 || c.ua >= da.width() || c.va < 0 || c.va >= da.height() ||
        c.ub < 0 || c.ub >= kb.width || c.vb < 0 || c.vb >= kb.height)
      throw bad_data("correspondence: pixel out of range on frames (" +
                     std::to_string(c.frame_a) + ", " + std::to_string(c.frame_b) + ")");
    if (c.weight < 0) throw bad_data("correspondence: negative weight");

    if (!da.valid(c.va, c.ua)) {
      ++res.skipped;
      continue;
    }
    const Pose& pa = state.poses[c.frame_a];
    const Pose& pb = state.poses[c.frame_b];
    const double d = da.values(c.va, c.ua);
    const Eigen::Vector3d ray = pixel_ray<double>(ka, double(c.ua), double(c.va));
    const Eigen::Vector3d xa = d * ray;
    const Eigen::Vector3d world = pa.apply(xa);
    const Eigen::Vector3d xb = pb.rotation().transpose() * (world - pb.translation());
    if (!(xb.z() > 1e-12)) {
      ++res.skipped;
      continue;
    }
    const Eigen::Vector2d proj(kb.fx * xb.x() / xb.z() + kb.cx,
                               kb.fy * xb.y() / xb.z() + kb.cy);
    const Eigen::Vector2d rho = proj - Eigen::Vector2d(c.ub, c.vb);
    sum.add(c.weight * rho.squaredNorm());
    if (!grad) continue;

    const double wc = 2.0 * lambda * c.weight;
    Eigen::Matrix<double, 2, 3> pj;
    pj << kb.fx / xb.z(), 0, -kb.fx * xb.x() / (xb.z() * xb.z()),
        0, kb.fy / xb.z(), -kb.fy * xb.y() / (xb.z() * xb.z());
    const Eigen::Vector3d s = wc * (pj.transpose() * rho);  // dE/dx_b
    const Eigen::Matrix3d ab = pb.rotation().transpose() * pa.rotation();
    grad->depth[c.frame_a](c.va, c.ua) += s.dot(ab * ray);
    grad->focal[c.frame_a] += s.dot(ab * Eigen::Vector3d(-xa.x() / ka.fx,
                                                         -xa.y() / ka.fx, 0.0));
    grad->focal[c.frame_b] += wc * (rho.x() * xb.x() / xb.z() + rho.y() * xb.y() / xb.z());
    const Eigen::Vector3d u = pb.rotation() * s;
    Vector6d g;
    g.head<3>() = u;
    g.tail<3>() = world.cross(u);
    grad->pose[c.frame_a] += g;
    grad->pose[c.frame_b] -= g;
  }
  res.value = sum.value();
  return res;
}

}  // namespace palign
