#include "palign/arch/loss.hpp"

#include <cmath>

#include "palign/core/kahan.hpp"

namespace palign {

namespace {

struct SharedMask {
  std::vector<Eigen::Index> pixels;
};

SharedMask shared_valid(const PointMap& pred, const PointMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw bad_data("regression_loss: shapes " + shape_str(pred.height(), pred.width()) +
                   " vs " + shape_str(gt.height(), gt.width()));
  SharedMask m;
  for (Eigen::Index y = 0; y < pred.height(); ++y)
    for (Eigen::Index x = 0; x < pred.width(); ++x)
      if (pred.valid(y, x) && gt.valid(y, x)) m.pixels.push_back(pred.index(y, x));
  if (m.pixels.empty()) throw bad_data("regression_loss: empty shared valid mask");
  return m;
}

double mean_norm(const PointMap& pm, const SharedMask& mask) {
  KahanSum s;
  for (Eigen::Index i : mask.pixels) s.add(pm.points.col(i).norm());
  return s.value() / double(mask.pixels.size());
}

}  // namespace

double regression_loss(const PointMap& pred, const PointMap& gt) {
  const SharedMask mask = shared_valid(pred, gt);
  const double z = mean_norm(pred, mask);
  const double zbar = mean_norm(gt, mask);
  KahanSum s;
  for (Eigen::Index i : mask.pixels)
    s.add((pred.points.col(i) / z - gt.points.col(i) / zbar).norm());
  return s.value() / double(mask.pixels.size());
}

double regression_loss_with_grad(const PointMap& pred, const PointMap& gt,
                                 Eigen::Matrix3Xd& grad) {
  const SharedMask mask = shared_valid(pred, gt);
  const double v = double(mask.pixels.size());
  const double z = mean_norm(pred, mask);
  const double zbar = mean_norm(gt, mask);

  grad = Eigen::Matrix3Xd::Zero(3, pred.size());
  KahanSum s;
  double dot_sum = 0;  // sum_p u_p . pred_p, for the dL/dz chain
  for (Eigen::Index i : mask.pixels) {
    const Eigen::Vector3d r = pred.points.col(i) / z - gt.points.col(i) / zbar;
    const double norm = r.norm();
    s.add(norm);
    if (norm > 0) {
      const Eigen::Vector3d u = r / norm;
      grad.col(i) += u / (v * z);
      dot_sum += u.dot(pred.points.col(i));
    }
  }
  // z depends on every valid predicted point: dz/dp_q = p_q / (V |p_q|).
  const double dl_dz = -dot_sum / (v * z * z);
  for (Eigen::Index i : mask.pixels) {
    const double norm = pred.points.col(i).norm();
    if (norm > 0) grad.col(i) += dl_dz * pred.points.col(i) / (v * norm);
  }
  return s.value() / v;
}

MaskGrid depth_filter_mask(const DepthMap& depth, double threshold_m) {
  return depth.valid && (depth.values <= threshold_m);
}

}  // namespace palign
