#pragma once

#include <Eigen/Core>

#include "palign/geom/grids.hpp"

namespace palign {

// Scale-normalized point regression loss: both maps are divided by the mean
// Euclidean norm of their own valid points, then the per-pixel point distance
// is averaged over the shared valid mask. Invariant under positive uniform
// scaling of either argument.
double regression_loss(const PointMap& pred, const PointMap& gt);

// Same value plus the gradient with respect to the predicted points
// (3 x (H W), zero on masked pixels).
double regression_loss_with_grad(const PointMap& pred, const PointMap& gt,
                                 Eigen::Matrix3Xd& grad);

// valid iff previously valid and depth <= threshold (exactly at the threshold
// counts as valid).
MaskGrid depth_filter_mask(const DepthMap& depth, double threshold_m = 400.0);

}  // namespace palign
