#include "palign/harness/scene.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "palign/geom/camera.hpp"

namespace palign {

namespace {

Eigen::Matrix3d rot_y(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

}  // namespace

Scene::Scene(const SceneSpec& spec) : spec_(spec) {
  spec_.check();
  intrinsics_ = Intrinsics(spec_.focal, spec_.focal, (spec_.width - 1) / 2.0,
                           (spec_.height - 1) / 2.0, spec_.width, spec_.height);
  std::mt19937_64 rng(spec_.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Random surface; wave slopes are kept well below the ray z-slope so every
  // pixel ray hits the surface exactly once.
  const int n_waves = std::max(1, spec_.field.waves);
  for (int i = 0; i < n_waves; ++i) {
    Wave w;
    w.amp = spec_.field.amplitude / n_waves * (0.5 + 0.5 * unit(rng));
    const double k = 0.4 + 0.8 * unit(rng);
    const double dir = 2 * std::numbers::pi * unit(rng);
    w.kx = k * std::cos(dir);
    w.ky = k * std::sin(dir);
    w.phase = 2 * std::numbers::pi * unit(rng);
    waves_.push_back(w);
  }
  for (int i = 0; i < spec_.field.blobs; ++i) {
    Blob b;
    b.x0 = -1.0 + 2.0 * unit(rng);
    b.y0 = -0.8 + 1.6 * unit(rng);
    const double dir = 2 * std::numbers::pi * unit(rng);
    b.vx = spec_.field.blob_speed * std::cos(dir);
    b.vy = spec_.field.blob_speed * std::sin(dir);
    b.amplitude = spec_.field.blob_amplitude;
    b.radius = spec_.field.blob_radius;
    blobs_.push_back(b);
  }

  // Camera trajectory.
  std::normal_distribution<double> gauss(0.0, 1.0);
  Pose pose = Pose::identity();
  for (int k = 0; k < spec_.frames; ++k) {
    switch (spec_.path.kind) {
      case CameraPathKind::Line:
        pose = Pose(Eigen::Matrix3d::Identity(),
                    Eigen::Vector3d(k * spec_.path.step, 0, 0));
        break;
      case CameraPathKind::Arc: {
        const double a =
            spec_.path.arc_angle * (double(k) / std::max(1, spec_.frames - 1) - 0.5);
        const Eigen::Vector3d look_at(0, 0, spec_.field.base_depth);
        pose = Pose(rot_y(a),
                    look_at - spec_.field.base_depth *
                                  Eigen::Vector3d(std::sin(a), 0, std::cos(a)));
        break;
      }
      case CameraPathKind::RandomWalk: {
        if (k > 0) {
          Eigen::Vector3d dir(gauss(rng), gauss(rng), 0.2 * gauss(rng));
          dir.normalize();
          Eigen::Vector3d phi(gauss(rng), gauss(rng), gauss(rng));
          phi *= 0.01;
          pose = Pose(pose.rotation() * exp_so3<double>(phi),
                      pose.translation() + spec_.path.step * dir);
        }
        break;
      }
    }
    poses_.push_back(pose);
    timestamps_.push_back(k / 30.0);
  }

  // Render depth maps and dynamic masks.
  for (int k = 0; k < spec_.frames; ++k) {
    DepthMap d(spec_.height, spec_.width);
    MaskGrid dyn = MaskGrid::Constant(spec_.height, spec_.width, false);
    for (int y = 0; y < spec_.height; ++y) {
      for (int x = 0; x < spec_.width; ++x) {
        const double depth = raycast_depth(k, double(x), double(y));
        d.values(y, x) = depth;
        if (!blobs_.empty()) {
          const Eigen::Vector3d p_world =
              poses_[k].apply(depth * pixel_ray<double>(intrinsics_, double(x), double(y)));
          dyn(y, x) = std::abs(blob_offset(k, p_world.x(), p_world.y())) >
                      0.01 * spec_.field.blob_amplitude;
        }
      }
    }
    d.check();
    depths_.push_back(std::move(d));
    dynamic_masks_.push_back(std::move(dyn));
  }

  // Monocular depth stand-ins.
  std::mt19937_64 mono_rng(spec_.seed ^ 0x6d6f6e6fULL);
  for (int k = 0; k < spec_.frames; ++k) {
    DepthMap m = depths_[k];
    switch (spec_.mono.model) {
      case MonoModel::Exact:
        break;
      case MonoModel::PerFrameScale: {
        const double c = std::exp(spec_.mono.scale_range * (2 * unit(mono_rng) - 1));
        m.values *= c;
        break;
      }
      case MonoModel::Warped: {
        const double phi = 2 * std::numbers::pi * unit(mono_rng);
        const double psi = 2 * std::numbers::pi * unit(mono_rng);
        for (int y = 0; y < spec_.height; ++y)
          for (int x = 0; x < spec_.width; ++x)
            m.values(y, x) *=
                1.0 + spec_.mono.warp_amplitude *
                          std::sin(2 * std::numbers::pi * x / spec_.width + phi) *
                          std::cos(2 * std::numbers::pi * y / spec_.height + psi);
        break;
      }
    }
    mono_depths_.push_back(std::move(m));
  }
}

double Scene::blob_offset(int frame, double x, double y) const {
  double h = 0.0;
  for (const Blob& b : blobs_) {
    const double cx = b.x0 + frame * b.vx;
    const double cy = b.y0 + frame * b.vy;
    const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    h -= b.amplitude * std::exp(-r2 / (2 * b.radius * b.radius));
  }
  return h;
}

double Scene::surface_height(int frame, double x, double y) const {
  double h = spec_.field.base_depth + blob_offset(frame, x, y);
  for (const Wave& w : waves_)
    h += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
  return h;
}

double Scene::raycast_depth(int frame, double u, double v) const {
  const Eigen::Vector3d d = poses_[frame].rotation() * pixel_ray<double>(intrinsics_, u, v);
  const Eigen::Vector3d o = poses_[frame].translation();
  double s = (spec_.field.base_depth - o.z()) / d.z();
  for (int it = 0; it < 50; ++it) {
    const double x = o.x() + s * d.x();
    const double y = o.y() + s * d.y();
    double h = spec_.field.base_depth;
    double hx = 0.0, hy = 0.0;
    for (const Wave& w : waves_) {
      const double arg = w.kx * x + w.ky * y + w.phase;
      h += w.amp * std::sin(arg);
      hx += w.amp * std::cos(arg) * w.kx;
      hy += w.amp * std::cos(arg) * w.ky;
    }
    for (const Blob& b : blobs_) {
      const double cx = b.x0 + frame * b.vx;
      const double cy = b.y0 + frame * b.vy;
      const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      const double g = b.amplitude * std::exp(-r2 / (2 * b.radius * b.radius));
      h -= g;
      hx += g * (x - cx) / (b.radius * b.radius);
      hy += g * (y - cy) / (b.radius * b.radius);
    }
    const double residual = o.z() + s * d.z() - h;
    if (std::abs(residual) < 1e-13) break;
    s -= residual / (d.z() - hx * d.x() - hy * d.y());
  }
  return s;
}

RenderResult render_pair_predictions(const Scene& scene, const ViewGraph& graph) {
  if (graph.frame_count > scene.frame_count())
    throw bad_data("render_pair_predictions: graph has more frames than the scene");
  const NoiseSpec& noise = scene.spec().noise;
  std::mt19937_64 rng(scene.spec().seed ^ 0x70616972ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  RenderResult out;
  out.edge_scales = Eigen::VectorXd::Ones(Eigen::Index(graph.edges.size()));
  const double base_conf = 1.0 / (1.0 + noise.sigma);

  for (size_t ei = 0; ei < graph.edges.size(); ++ei) {
    const Edge e = graph.edges[ei];
    const double s_e = std::exp(noise.edge_scale_jitter * unit(rng));
    out.edge_scales[Eigen::Index(ei)] = s_e;

    PairPrediction pair;
    pair.edge = e;
    pair.x_n = unproject(scene.depths()[e.n], scene.intrinsics());
    pair.x_m = transform_to_view(unproject(scene.depths()[e.m], scene.intrinsics()),
                                 scene.poses()[e.m], scene.poses()[e.n]);
    pair.x_n.points /= s_e;
    pair.x_m.points /= s_e;
    if (noise.sigma > 0) {
      for (Eigen::Index i = 0; i < pair.x_n.points.cols(); ++i)
        for (int a = 0; a < 3; ++a) {
          pair.x_n.points(a, i) += noise.sigma * gauss(rng);
          pair.x_m.points(a, i) += noise.sigma * gauss(rng);
        }
    }
    pair.c_n = ConfidenceMap(scene.depths()[e.n].height(), scene.depths()[e.n].width());
    pair.c_m = pair.c_n;
    pair.c_n.weights.setConstant(base_conf);
    pair.c_m.weights.setConstant(base_conf);
    if (!scene.dynamic_masks().empty()) {
      pair.c_n.weights = scene.dynamic_masks()[e.n].select(
          noise.dynamic_downweight * pair.c_n.weights, pair.c_n.weights);
      pair.c_m.weights = scene.dynamic_masks()[e.m].select(
          noise.dynamic_downweight * pair.c_m.weights, pair.c_m.weights);
    }
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

AlignmentState ground_truth_state(const Scene& scene, const Eigen::VectorXd& edge_scales) {
  AlignmentState state;
  state.depths = scene.depths();
  state.poses = scene.poses();
  state.intrinsics.assign(scene.frame_count(), scene.intrinsics());
  state.edge_scales = edge_scales;
  return state;
}

}  // namespace palign
