#pragma once

#include "palign/align/energy.hpp"
#include "palign/align/types.hpp"

namespace palign {

struct CorrespondenceResult {
  double value = 0.0;  // weighted squared reprojection error in pixels^2
  int skipped = 0;     // correspondences dropped at invalid depth pixels
};

// Reprojection term: unproject pixel a with (D_a, f_a), map through
// T_{b<-a}, project with frame b's intrinsics and penalize the pixel offset
// against the matched location. Scaled by lambda and added to the alignment
// energy when enabled. When grad is non-null the contributions are added
// into the same gradient blocks as the alignment energy.
CorrespondenceResult correspondence_residual(const AlignmentState& state,
                                             const CorrespondenceSet& corr,
                                             double lambda,
                                             EnergyGradient* grad = nullptr);

}  // namespace palign
