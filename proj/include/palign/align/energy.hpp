#pragma once

#include <Eigen/Core>

#include <vector>

#include "palign/align/types.hpp"
#include "palign/geom/sim3.hpp"

namespace palign {

// Gradient of the alignment energy, one block per unknown. Pose gradients
// live in the tangent space at the current pose (left retraction); scale
// gradients are with respect to log sigma_e. Depth and focal gradients are
// with respect to the plain values; the optimizer chains into log space.
struct EnergyGradient {
  double energy = 0.0;
  std::vector<Eigen::ArrayXXd> depth;
  std::vector<Vector6d> pose;
  Eigen::VectorXd focal;
  Eigen::VectorXd log_scale;

  static EnergyGradient zero(const AlignmentState& state);
  void merge(const EnergyGradient& other);
  void scale_to_log_depth(const AlignmentState& state);
};

// Confidence-weighted alignment energy over all pairs. The 3D residual of a
// pixel compares the state's unprojected depth, mapped into the edge's
// reference frame and divided by sigma_e, against the predicted point:
//
//   r = T_{n<-v}(unproject(D_v, f_v)) / sigma_e - X_v^e
//
// which is the per-pixel misfit measured in prediction units. Dividing by
// sigma_e (rather than multiplying the prediction) keeps the energy exactly
// invariant under the global similarity gauge. Depth-only mode keeps just the
// z component of the same comparison, expressed in view v.
double total_energy(const AlignmentState& state, const std::vector<PairPrediction>& pairs,
                    const OptimConfig& config);

EnergyGradient energy_gradient(const AlignmentState& state,
                               const std::vector<PairPrediction>& pairs,
                               const OptimConfig& config);

// The gauge action: rotates/translates all poses, scales depths, pose
// translations and edge scales by s. Leaves the energy unchanged.
AlignmentState apply_similarity(const AlignmentState& state, const Sim3& g);

}  // namespace palign
