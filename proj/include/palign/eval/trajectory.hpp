#pragma once

#include <vector>

#include "palign/geom/pose.hpp"
#include "palign/geom/sim3.hpp"

namespace palign {

struct Trajectory {
  std::vector<double> timestamps;
  std::vector<Pose> poses;

  size_t size() const { return poses.size(); }

  void check() const {
    if (timestamps.size() != poses.size())
      throw bad_data("Trajectory: " + std::to_string(timestamps.size()) +
                     " timestamps for " + std::to_string(poses.size()) + " poses");
    for (size_t i = 1; i < timestamps.size(); ++i)
      if (!(timestamps[i] > timestamps[i - 1]))
        throw bad_data("Trajectory: timestamps not strictly increasing at index " +
                       std::to_string(i));
  }
};

// Closed-form similarity minimizing sum ||s R src_i + t - dst_i||^2 over the
// positions (Umeyama). Throws on fewer than 3 poses or zero spread.
Sim3 umeyama(const std::vector<Eigen::Vector3d>& src,
             const std::vector<Eigen::Vector3d>& dst);

struct TrajectoryAlignment {
  Sim3 sim;              // maps predicted positions onto the ground truth
  Trajectory aligned;    // predicted trajectory with the similarity applied
};

TrajectoryAlignment align_trajectory(const Trajectory& pred, const Trajectory& gt);

struct PoseMetrics {
  double ate_m = 0;     // RMS position residual after Sim(3) alignment
  double rte = 0;       // mean relative translation error, consecutive poses
  double rre_deg = 0;   // mean relative rotation error in degrees
  Sim3 sim;
};

// RTE/RRE follow E_i = (Q_i^-1 Q_{i+1})^-1 (P_i^-1 P_{i+1}) with the
// prediction's relative translations brought to metric scale by the fitted
// similarity's scale.
PoseMetrics pose_metrics(const Trajectory& pred, const Trajectory& gt);

}  // namespace palign
