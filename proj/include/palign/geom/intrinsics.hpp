#pragma once

#include <algorithm>
#include <string>

#include "palign/core/error.hpp"

namespace palign {

// Pinhole intrinsics in pixels. fx/fy may differ; the synthetic harness and
// the optimizer use a shared focal (fx == fy).
struct Intrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;

  Intrinsics() = default;
  Intrinsics(double fx_, double fy_, double cx_, double cy_, int w, int h)
      : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(w), height(h) {
    if (!(fx > 0) || !(fy > 0))
      throw bad_data("Intrinsics: focal lengths must be positive, got fx=" +
                     std::to_string(fx) + " fy=" + std::to_string(fy));
    if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height))
      throw bad_data("Intrinsics: principal point (" + std::to_string(cx) + ", " +
                     std::to_string(cy) + ") outside " + std::to_string(width) +
                     "x" + std::to_string(height) + " image");
  }

  Intrinsics with_focal(double f) const {
    return Intrinsics(f, f, cx, cy, width, height);
  }
};

// Fixed-focal fallback for depth sources that do not predict a focal length.
// The 1.2 prior is a config knob, not a calibration claim.
inline Intrinsics fallback_intrinsics(int width, int height, double factor = 1.2) {
  const double f = factor * std::max(width, height);
  return Intrinsics(f, f, (width - 1) / 2.0, (height - 1) / 2.0, width, height);
}

}  // namespace palign
