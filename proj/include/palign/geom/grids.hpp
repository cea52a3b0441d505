#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "palign/core/error.hpp"

namespace palign {

using MaskGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(cols) + "x" + std::to_string(rows) + " (WxH)";
}

// Per-pixel depth in meters, row `y`, column `x`. Invalid pixels are excluded
// from every reduction; valid entries must be finite and positive.
template <typename S>
struct DepthMapT {
  Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic> values;  // H x W
  MaskGrid valid;                                          // H x W

  DepthMapT() = default;
  DepthMapT(Eigen::Index h, Eigen::Index w)
      : values(Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>::Zero(h, w)),
        valid(MaskGrid::Constant(h, w, true)) {}

  Eigen::Index height() const { return values.rows(); }
  Eigen::Index width() const { return values.cols(); }

  void check() const {
    if (valid.rows() != values.rows() || valid.cols() != values.cols())
      throw bad_data("DepthMap: mask shape " + shape_str(valid.rows(), valid.cols()) +
                     " != value shape " + shape_str(values.rows(), values.cols()));
    for (Eigen::Index y = 0; y < values.rows(); ++y)
      for (Eigen::Index x = 0; x < values.cols(); ++x)
        if (valid(y, x) && !(std::isfinite(values(y, x)) && values(y, x) > S(0)))
          throw bad_data("DepthMap: invalid depth " + std::to_string(double(values(y, x))) +
                         " at pixel (" + std::to_string(x) + ", " + std::to_string(y) + ")");
  }
};

// Per-pixel 3D points in a declared camera frame. Stored as a 3 x (H*W)
// matrix with pixel index p = y * W + x so whole-map transforms stay single
// Eigen products.
template <typename S>
struct PointMapT {
  Eigen::Matrix<S, 3, Eigen::Dynamic> points;  // 3 x (H*W)
  MaskGrid valid;                              // H x W

  PointMapT() = default;
  PointMapT(Eigen::Index h, Eigen::Index w)
      : points(Eigen::Matrix<S, 3, Eigen::Dynamic>::Zero(3, h * w)),
        valid(MaskGrid::Constant(h, w, true)) {}

  Eigen::Index height() const { return valid.rows(); }
  Eigen::Index width() const { return valid.cols(); }
  Eigen::Index size() const { return points.cols(); }

  Eigen::Index index(Eigen::Index y, Eigen::Index x) const { return y * width() + x; }

  Eigen::Matrix<S, 3, 1> at(Eigen::Index y, Eigen::Index x) const {
    return points.col(index(y, x));
  }
};

// Non-negative per-pixel weights.
template <typename S>
struct ConfidenceMapT {
  Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic> weights;  // H x W

  ConfidenceMapT() = default;
  explicit ConfidenceMapT(Eigen::Index h, Eigen::Index w)
      : weights(Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>::Ones(h, w)) {}

  Eigen::Index height() const { return weights.rows(); }
  Eigen::Index width() const { return weights.cols(); }

  void check() const {
    if (!weights.isFinite().all() || (weights < S(0)).any())
      throw bad_data("ConfidenceMap: weights must be finite and >= 0");
  }
};

using DepthMap = DepthMapT<double>;
using PointMap = PointMapT<double>;
using ConfidenceMap = ConfidenceMapT<double>;

}  // namespace palign
