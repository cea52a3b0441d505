#pragma once

#include <cstdint>
#include <vector>

#include "palign/align/types.hpp"
#include "palign/geom/grids.hpp"
#include "palign/geom/intrinsics.hpp"
#include "palign/geom/pose.hpp"
#include "palign/graph/viewgraph.hpp"

namespace palign {

enum class CameraPathKind { Line, Arc, RandomWalk };
enum class MonoModel { Exact, PerFrameScale, Warped };

struct CameraPathSpec {
  CameraPathKind kind = CameraPathKind::Line;
  double step = 0.1;        // meters per frame (Line, RandomWalk)
  double arc_angle = 0.15;  // total swept angle in radians (Arc)
};

struct DepthFieldSpec {
  double base_depth = 4.0;
  double amplitude = 0.3;  // total height variation of the random surface
  int waves = 3;
  int blobs = 0;  // moving bumps; > 0 makes the scene dynamic
  double blob_amplitude = 0.35;
  double blob_radius = 0.35;
  double blob_speed = 0.08;  // meters per frame
};

struct NoiseSpec {
  double sigma = 0.0;              // Gaussian sigma on point maps, meters
  double edge_scale_jitter = 0.0;  // per-edge log-scale range; s_e in e^[-j, j]
  double dynamic_downweight = 0.1; // confidence factor on dynamic pixels
};

struct MonoSpec {
  MonoModel model = MonoModel::Exact;
  double scale_range = 0.3;     // PerFrameScale: c_k in e^[-r, r]
  double warp_amplitude = 0.3;  // Warped: per-frame sinusoidal distortion
};

// Fully deterministic under the seed.
struct SceneSpec {
  int frames = 5;
  int width = 64;
  int height = 48;
  double focal = 60.0;
  CameraPathSpec path;
  DepthFieldSpec field;
  NoiseSpec noise;
  MonoSpec mono;
  std::uint64_t seed = 0;

  void check() const {
    if (frames < 2) throw bad_data("SceneSpec: need at least 2 frames");
    if (width < 2 || height < 2) throw bad_data("SceneSpec: resolution too small");
    if (noise.sigma < 0) throw bad_data("SceneSpec: noise sigma must be >= 0");
  }
};

// A smooth random surface z = h(x, y) in world space, raycast per frame, so
// the ground-truth depth maps are views of one consistent scene. Moving
// Gaussian bumps provide dynamic content, marked in per-frame masks.
class Scene {
 public:
  explicit Scene(const SceneSpec& spec);

  const SceneSpec& spec() const { return spec_; }
  const Intrinsics& intrinsics() const { return intrinsics_; }
  const std::vector<Pose>& poses() const { return poses_; }
  const std::vector<double>& timestamps() const { return timestamps_; }
  const std::vector<DepthMap>& depths() const { return depths_; }
  const std::vector<MaskGrid>& dynamic_masks() const { return dynamic_masks_; }
  const std::vector<DepthMap>& mono_depths() const { return mono_depths_; }
  int frame_count() const { return spec_.frames; }

  // Surface height (world z) under a frame's blob configuration.
  double surface_height(int frame, double x, double y) const;
  // Camera-frame depth of the surface along the ray of a (possibly
  // fractional) pixel. The same function renders the stored depth maps.
  double raycast_depth(int frame, double u, double v) const;

 private:
  struct Wave {
    double amp, kx, ky, phase;
  };
  struct Blob {
    double x0, y0, vx, vy, amplitude, radius;
  };

  double blob_offset(int frame, double x, double y) const;

  SceneSpec spec_;
  Intrinsics intrinsics_;
  std::vector<Wave> waves_;
  std::vector<Blob> blobs_;
  std::vector<Pose> poses_;
  std::vector<double> timestamps_;
  std::vector<DepthMap> depths_;
  std::vector<MaskGrid> dynamic_masks_;
  std::vector<DepthMap> mono_depths_;
};

inline Scene synth_scene(const SceneSpec& spec) { return Scene(spec); }

struct RenderResult {
  std::vector<PairPrediction> pairs;
  Eigen::VectorXd edge_scales;  // s_e per edge; predictions are metric / s_e
};

// Emulates the pairwise predictor interface: for edge (n, m) both maps are
// expressed in frame n's camera coordinates, divided by a per-edge random
// scale (the scale ambiguity of real predictions) and perturbed by Gaussian
// noise. Confidence follows 1 / (1 + sigma), down-weighted on dynamic pixels.
RenderResult render_pair_predictions(const Scene& scene, const ViewGraph& graph);

// The generator's own optimum: ground-truth depths, poses, intrinsics and the
// per-edge scales that zero the energy on noiseless renders.
AlignmentState ground_truth_state(const Scene& scene, const Eigen::VectorXd& edge_scales);

}  // namespace palign
