#pragma once

#include <vector>

#include "palign/geom/grids.hpp"

namespace palign {

struct ScaleShift {
  double scale = 1.0;
  double shift = 0.0;
  bool degenerate = false;  // constant predictions, scale-only fallback used
};

// Least-squares (s, t) minimizing sum (s * pred + t - gt)^2 over the jointly
// valid pixels of the whole sequence; one shared fit per sequence.
ScaleShift fit_scale_shift(const std::vector<DepthMap>& pred,
                           const std::vector<DepthMap>& gt);

std::vector<DepthMap> apply_scale_shift(const std::vector<DepthMap>& pred,
                                        const ScaleShift& ss);

struct DepthMetrics {
  double abs_rel = 0;
  double delta_125 = 0;
  long nonpositive = 0;  // aligned predictions <= 0; counted as delta outliers
};

// abs_rel = mean |pred - gt| / gt, delta = fraction with
// max(pred/gt, gt/pred) < 1.25, both over all jointly valid pixels of the
// sequence. Alignment must already be applied.
DepthMetrics depth_metrics(const std::vector<DepthMap>& pred_aligned,
                           const std::vector<DepthMap>& gt);

}  // namespace palign
