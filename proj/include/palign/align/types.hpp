#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "palign/geom/grids.hpp"
#include "palign/geom/intrinsics.hpp"
#include "palign/geom/pose.hpp"
#include "palign/graph/viewgraph.hpp"

namespace palign {

// One edge's prediction: point maps of both frames expressed in frame n's
// camera coordinates, with per-pixel confidences.
struct PairPrediction {
  Edge edge;
  PointMap x_n, x_m;
  ConfidenceMap c_n, c_m;

  void check() const {
    if (x_n.width() != x_m.width() || x_n.height() != x_m.height() ||
        c_n.width() != x_n.width() || c_n.height() != x_n.height() ||
        c_m.width() != x_n.width() || c_m.height() != x_n.height())
      throw bad_data("PairPrediction: grid shapes disagree on edge (" +
                     std::to_string(edge.n) + ", " + std::to_string(edge.m) + ")");
    c_n.check();
    c_m.check();
  }
};

// The unknowns of the alignment energy: per-frame depth, pose and focal, plus
// one positive scale per edge relating prediction units to the global
// reconstruction. edge_scales[i] belongs to pairs[i] of the edge list the
// state was built against.
struct AlignmentState {
  std::vector<DepthMap> depths;
  std::vector<Pose> poses;
  std::vector<Intrinsics> intrinsics;
  Eigen::VectorXd edge_scales;

  int frame_count() const { return int(poses.size()); }
};

// Scale-map variant: depth is realized as S_v .* mono_depth_v instead of a
// free per-pixel depth.
struct ScaleMapState {
  std::vector<Eigen::ArrayXXd> scale_maps;
  std::vector<DepthMap> mono_depths;
  std::vector<Pose> poses;
  std::vector<Intrinsics> intrinsics;
  Eigen::VectorXd edge_scales;

  DepthMap realized_depth(int frame) const {
    DepthMap d = mono_depths[frame];
    d.values *= scale_maps[frame];
    return d;
  }
};

// Sparse pixel correspondences between two frames, with weights.
struct Correspondence {
  int frame_a = 0;
  int ua = 0, va = 0;
  int frame_b = 0;
  int ub = 0, vb = 0;
  double weight = 1.0;
};

using CorrespondenceSet = std::vector<Correspondence>;

enum class ResidualMode { ThreeD, DepthOnly };
enum class LrSchedule { Cosine, Constant };
enum class KeyframeChoice { First, Middle };

struct OptimConfig {
  int iterations = 300;
  double learning_rate = 0.05;
  LrSchedule schedule = LrSchedule::Cosine;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int clip_length = 10;
  ResidualMode residual = ResidualMode::ThreeD;
  double corr_weight = 0.01;

  bool optimize_focals = true;
  bool normalize_edge_scales = true;  // keep prod(sigma_e) = 1 after each step
  KeyframeChoice keyframe = KeyframeChoice::First;
  std::vector<int> frozen_frames;  // depth/pose/focal held fixed
  int threads = 1;

  void check() const {
    if (iterations < 1) throw bad_data("OptimConfig: iterations must be >= 1");
    if (!(learning_rate > 0)) throw bad_data("OptimConfig: learning_rate must be > 0");
    if (clip_length < 2) throw bad_data("OptimConfig: clip_length must be >= 2");
  }
};

}  // namespace palign
