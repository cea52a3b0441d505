#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "palign/core/kahan.hpp"
#include "palign/eval/depth_metrics.hpp"
#include "palign/eval/trajectory.hpp"

namespace palign {

namespace {

void check_sequences(const std::vector<DepthMap>& pred, const std::vector<DepthMap>& gt) {
  if (pred.size() != gt.size() || pred.empty())
    throw bad_data("depth sequences: got " + std::to_string(pred.size()) +
                   " predicted frames vs " + std::to_string(gt.size()) + " ground truth");
  for (size_t k = 0; k < pred.size(); ++k)
    if (pred[k].width() != gt[k].width() || pred[k].height() != gt[k].height())
      throw bad_data("depth sequences: frame " + std::to_string(k) + " shape mismatch");
}

}  // namespace

ScaleShift fit_scale_shift(const std::vector<DepthMap>& pred,
                           const std::vector<DepthMap>& gt) {
  check_sequences(pred, gt);
  KahanSum spp, sp, sg, spg;
  long n = 0;
  for (size_t k = 0; k < pred.size(); ++k) {
    for (Eigen::Index y = 0; y < pred[k].height(); ++y) {
      for (Eigen::Index x = 0; x < pred[k].width(); ++x) {
        if (!pred[k].valid(y, x) || !gt[k].valid(y, x)) continue;
        const double p = pred[k].values(y, x);
        const double g = gt[k].values(y, x);
        spp.add(p * p);
        sp.add(p);
        sg.add(g);
        spg.add(p * g);
        ++n;
      }
    }
  }
  if (n == 0) throw bad_data("fit_scale_shift: no jointly valid pixels");

  ScaleShift ss;
  const double det = spp.value() * n - sp.value() * sp.value();
  const double variance = det / double(n) / double(n);
  if (variance < 1e-12 * std::max(1.0, spp.value() / double(n))) {
    ss.degenerate = true;
    ss.scale = spp.value() > 0 ? spg.value() / spp.value() : 1.0;
    ss.shift = 0.0;
    return ss;
  }
  ss.scale = (spg.value() * n - sp.value() * sg.value()) / det;
  ss.shift = (spp.value() * sg.value() - sp.value() * spg.value()) / det;
  return ss;
}

std::vector<DepthMap> apply_scale_shift(const std::vector<DepthMap>& pred,
                                        const ScaleShift& ss) {
  std::vector<DepthMap> out = pred;
  for (DepthMap& d : out) d.values = ss.scale * d.values + ss.shift;
  return out;
}

DepthMetrics depth_metrics(const std::vector<DepthMap>& pred_aligned,
                           const std::vector<DepthMap>& gt) {
  check_sequences(pred_aligned, gt);
  DepthMetrics m;
  KahanSum rel;
  long n = 0, inliers = 0;
  for (size_t k = 0; k < pred_aligned.size(); ++k) {
    for (Eigen::Index y = 0; y < gt[k].height(); ++y) {
      for (Eigen::Index x = 0; x < gt[k].width(); ++x) {
        if (!pred_aligned[k].valid(y, x) || !gt[k].valid(y, x)) continue;
        const double p = pred_aligned[k].values(y, x);
        const double g = gt[k].values(y, x);
        if (!(g > 0))
          throw bad_data("depth_metrics: non-positive ground truth at frame " +
                         std::to_string(k));
        ++n;
        rel.add(std::abs(p - g) / g);
        if (p <= 0) {
          ++m.nonpositive;  // ratio undefined, counted as outlier
          continue;
        }
        if (std::max(p / g, g / p) < 1.25) ++inliers;
      }
    }
  }
  if (n == 0) throw bad_data("depth_metrics: no jointly valid pixels");
  m.abs_rel = rel.value() / double(n);
  m.delta_125 = double(inliers) / double(n);
  return m;
}

Sim3 umeyama(const std::vector<Eigen::Vector3d>& src,
             const std::vector<Eigen::Vector3d>& dst) {
  if (src.size() != dst.size() || src.size() < 3)
    throw bad_data("umeyama: need at least 3 matched points, got " +
                   std::to_string(src.size()) + " / " + std::to_string(dst.size()));
  const double n = double(src.size());
  Eigen::Vector3d mu_s = Eigen::Vector3d::Zero(), mu_d = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < src.size(); ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= n;
  mu_d /= n;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double var_s = 0;
  for (size_t i = 0; i < src.size(); ++i) {
    cov += (dst[i] - mu_d) * (src[i] - mu_s).transpose();
    var_s += (src[i] - mu_s).squaredNorm();
  }
  cov /= n;
  var_s /= n;
  if (var_s < 1e-18)
    throw bad_data("umeyama: degenerate source trajectory (zero spread)");

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d s = Eigen::Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0) s.z() = -1;

  Sim3 g;
  g.rotation = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  g.scale = svd.singularValues().dot(s) / var_s;
  g.translation = mu_d - g.scale * (g.rotation * mu_s);
  return g;
}

TrajectoryAlignment align_trajectory(const Trajectory& pred, const Trajectory& gt) {
  pred.check();
  gt.check();
  if (pred.size() != gt.size())
    throw bad_data("align_trajectory: length mismatch " + std::to_string(pred.size()) +
                   " vs " + std::to_string(gt.size()));
  std::vector<Eigen::Vector3d> src, dst;
  for (size_t i = 0; i < pred.size(); ++i) {
    src.push_back(pred.poses[i].translation());
    dst.push_back(gt.poses[i].translation());
  }
  TrajectoryAlignment out;
  out.sim = umeyama(src, dst);
  out.aligned = pred;
  for (Pose& p : out.aligned.poses) p = out.sim.apply(p);
  return out;
}

PoseMetrics pose_metrics(const Trajectory& pred, const Trajectory& gt) {
  const TrajectoryAlignment alignment = align_trajectory(pred, gt);
  PoseMetrics m;
  m.sim = alignment.sim;

  KahanSum sq;
  for (size_t i = 0; i < gt.size(); ++i)
    sq.add((alignment.aligned.poses[i].translation() - gt.poses[i].translation())
               .squaredNorm());
  m.ate_m = std::sqrt(sq.value() / double(gt.size()));

  if (gt.size() < 2) return m;
  KahanSum te, re;
  for (size_t i = 0; i + 1 < gt.size(); ++i) {
    const Pose rel_gt = gt.poses[i].inverse() * gt.poses[i + 1];
    Pose rel_pred = pred.poses[i].inverse() * pred.poses[i + 1];
    rel_pred = Pose(rel_pred.rotation(), alignment.sim.scale * rel_pred.translation());
    const Pose err = rel_gt.inverse() * rel_pred;
    te.add(err.translation().norm());
    re.add(std::abs(Eigen::AngleAxisd(err.rotation()).angle()));
  }
  const double count = double(gt.size() - 1);
  m.rte = te.value() / count;
  m.rre_deg = re.value() / count * 180.0 / std::numbers::pi;
  return m;
}

}  // namespace palign
