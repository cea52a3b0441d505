#include "palign/align/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace palign {

namespace {

// Scalar Adam state; grids reuse it element-wise through the Array overload.
struct AdamScalar {
  double m = 0, v = 0;
  double step(double g, double lr, const OptimConfig& c, int t) {
    m = c.beta1 * m + (1 - c.beta1) * g;
    v = c.beta2 * v + (1 - c.beta2) * g * g;
    const double mh = m / (1 - std::pow(c.beta1, t));
    const double vh = v / (1 - std::pow(c.beta2, t));
    return lr * mh / (std::sqrt(vh) + c.epsilon);
  }
};

struct AdamGrid {
  Eigen::ArrayXXd m, v;
  void init(Eigen::Index rows, Eigen::Index cols) {
    m = Eigen::ArrayXXd::Zero(rows, cols);
    v = Eigen::ArrayXXd::Zero(rows, cols);
  }
  Eigen::ArrayXXd step(const Eigen::ArrayXXd& g, double lr, const OptimConfig& c, int t) {
    m = c.beta1 * m + (1 - c.beta1) * g;
    v = c.beta2 * v + (1 - c.beta2) * g.square();
    const double bc1 = 1 - std::pow(c.beta1, t);
    const double bc2 = 1 - std::pow(c.beta2, t);
    return lr * (m / bc1) / ((v / bc2).sqrt() + c.epsilon);
  }
};

struct AdamVec6 {
  Vector6d m = Vector6d::Zero(), v = Vector6d::Zero();
  Vector6d step(const Vector6d& g, double lr, const OptimConfig& c, int t) {
    m = c.beta1 * m + (1 - c.beta1) * g;
    v = c.beta2 * v + (1 - c.beta2) * g.cwiseProduct(g);
    const double bc1 = 1 - std::pow(c.beta1, t);
    const double bc2 = 1 - std::pow(c.beta2, t);
    return lr * (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + c.epsilon).matrix());
  }
};

// Renormalizes prod(sigma_e) to 1 by the similarity gauge (sigma, D, t) -> c
// (sigma, D, t); a pure re-gauging, the energy does not move.
void renormalize_gauge(AlignmentState& state, std::vector<Eigen::ArrayXXd>& log_offsets) {
  if (state.edge_scales.size() == 0) return;
  const double mean_log = state.edge_scales.array().log().mean();
  if (mean_log == 0.0) return;
  const double c = std::exp(-mean_log);
  state.edge_scales *= c;
  for (auto& d : state.depths) d.values *= c;
  for (auto& u : log_offsets) u += std::log(c);
  for (auto& p : state.poses)
    p = Pose(p.rotation(), c * p.translation());
}

OptimizeResult run_adam(const std::vector<PairPrediction>& pairs, AlignmentState state,
                        const OptimConfig& config, const CorrespondenceSet* corr,
                        std::vector<Eigen::ArrayXXd>* out_log_offsets) {
  config.check();
  const int n_frames = state.frame_count();
  std::vector<char> frozen(n_frames, 0);
  for (int f : config.frozen_frames) {
    if (f < 0 || f >= n_frames)
      throw bad_data("optimize: frozen frame " + std::to_string(f) + " out of range");
    frozen[f] = 1;
  }
  if (!config.frozen_frames.empty() && config.normalize_edge_scales)
    throw bad_data("optimize: edge-scale normalization must be off when frames are frozen "
                   "(the frozen variables pin the gauge)");

  // Depth is parameterized as base .* exp(u); u starts at zero.
  std::vector<Eigen::ArrayXXd> base(n_frames), log_offset(n_frames);
  std::vector<AdamGrid> adam_depth(n_frames);
  std::vector<AdamVec6> adam_pose(n_frames);
  std::vector<AdamScalar> adam_focal(n_frames);
  for (int k = 0; k < n_frames; ++k) {
    base[k] = state.depths[k].values;
    log_offset[k] = Eigen::ArrayXXd::Zero(base[k].rows(), base[k].cols());
    adam_depth[k].init(base[k].rows(), base[k].cols());
  }
  Eigen::VectorXd log_sigma = state.edge_scales.array().log();
  std::vector<AdamScalar> adam_sigma(state.edge_scales.size());

  OptimizeResult result;
  result.energy_trace.reserve(config.iterations + 1);
  result.pairs_evaluated = long(pairs.size());

  auto objective_of = [&](EnergyGradient* grad, int iteration) {
    double e;
    if (grad) {
      *grad = energy_gradient(state, pairs, config);
      e = grad->energy;
    } else {
      e = total_energy(state, pairs, config);
    }
    if (corr && config.corr_weight > 0) {
      const CorrespondenceResult cr =
          correspondence_residual(state, *corr, config.corr_weight, grad);
      e += config.corr_weight * cr.value;
      result.corr_skipped = cr.skipped;
    }
    if (!std::isfinite(e)) throw DivergenceError(iteration);
    return e;
  };

  for (int it = 0; it < config.iterations; ++it) {
    EnergyGradient grad;
    result.energy_trace.push_back(objective_of(&grad, it));
    grad.scale_to_log_depth(state);  // chain dE/dD -> dE/du
    const double lr = scheduled_lr(config, it);
    const int t = it + 1;

    for (int k = 0; k < n_frames; ++k) {
      if (frozen[k]) continue;
      log_offset[k] -= adam_depth[k].step(grad.depth[k], lr, config, t);
      state.depths[k].values = base[k] * log_offset[k].exp();
      state.poses[k] = state.poses[k].retract(-adam_pose[k].step(grad.pose[k], lr, config, t));
      if (config.optimize_focals) {
        const double f = state.intrinsics[k].fx;
        const double g_logf = f * grad.focal[k];
        const double new_logf = std::log(f) - adam_focal[k].step(g_logf, lr, config, t);
        state.intrinsics[k] = state.intrinsics[k].with_focal(std::exp(new_logf));
      }
    }
    for (Eigen::Index e = 0; e < log_sigma.size(); ++e) {
      log_sigma[e] -= adam_sigma[e].step(grad.log_scale[e], lr, config, t);
      state.edge_scales[e] = std::exp(log_sigma[e]);
    }
    if (config.normalize_edge_scales) {
      renormalize_gauge(state, log_offset);
      log_sigma = state.edge_scales.array().log();
    }
  }
  result.energy_trace.push_back(objective_of(nullptr, config.iterations));

  if (out_log_offsets) *out_log_offsets = std::move(log_offset);
  result.state = std::move(state);
  return result;
}

double median_of(std::vector<double>& v, double fallback) {
  if (v.empty()) return fallback;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

}  // namespace

double scheduled_lr(const OptimConfig& config, int iteration) {
  switch (config.schedule) {
    case LrSchedule::Cosine:
      return config.learning_rate * 0.5 *
             (1.0 + std::cos(std::numbers::pi * double(iteration) / double(config.iterations)));
    case LrSchedule::Constant:
      return config.learning_rate;
  }
  return config.learning_rate;
}

AlignmentState make_default_init(const std::vector<PairPrediction>& pairs, int frame_count,
                                 int width, int height,
                                 const std::vector<Intrinsics>* intrinsics,
                                 const std::vector<DepthMap>* mono_depths) {
  AlignmentState state;
  state.poses.assign(frame_count, Pose::identity());
  state.edge_scales = Eigen::VectorXd::Ones(Eigen::Index(pairs.size()));
  if (intrinsics) {
    if (int(intrinsics->size()) != frame_count)
      throw bad_data("make_default_init: wrong intrinsics count");
    state.intrinsics = *intrinsics;
  } else {
    state.intrinsics.assign(frame_count, fallback_intrinsics(width, height));
  }

  if (mono_depths) {
    if (int(mono_depths->size()) != frame_count)
      throw bad_data("make_default_init: wrong mono depth count");
    state.depths = *mono_depths;
    return state;
  }

  for (int k = 0; k < frame_count; ++k) {
    std::vector<double> samples;
    for (const PairPrediction& pair : pairs) {
      if (pair.edge.n != k) continue;
      for (Eigen::Index y = 0; y < pair.x_n.height(); ++y)
        for (Eigen::Index x = 0; x < pair.x_n.width(); ++x)
          if (pair.x_n.valid(y, x)) samples.push_back(pair.x_n.at(y, x).z());
    }
    if (samples.empty()) {
      for (const PairPrediction& pair : pairs) {
        if (pair.edge.m != k) continue;
        for (Eigen::Index y = 0; y < pair.x_m.height(); ++y)
          for (Eigen::Index x = 0; x < pair.x_m.width(); ++x)
            if (pair.x_m.valid(y, x)) samples.push_back(pair.x_m.at(y, x).norm());
      }
    }
    const double d0 = std::max(1e-3, median_of(samples, 1.0));
    DepthMap d(height, width);
    d.values.setConstant(d0);
    state.depths.push_back(std::move(d));
  }
  return state;
}

OptimizeResult optimize_global(const std::vector<PairPrediction>& pairs,
                               const AlignmentState& init, const OptimConfig& config,
                               const CorrespondenceSet* corr) {
  return run_adam(pairs, init, config, corr, nullptr);
}

ScaleMapResult optimize_scale_maps(const std::vector<PairPrediction>& pairs,
                                   const std::vector<DepthMap>& mono_depths,
                                   const OptimConfig& config,
                                   const std::vector<Intrinsics>* intrinsics,
                                   const CorrespondenceSet* corr) {
  if (mono_depths.empty()) throw bad_data("optimize_scale_maps: no monocular depths");
  for (size_t k = 0; k < mono_depths.size(); ++k) {
    if (!mono_depths[k].valid.any())
      throw bad_data("optimize_scale_maps: monocular depth of frame " + std::to_string(k) +
                     " has an empty valid mask");
    mono_depths[k].check();
  }
  const int w = int(mono_depths[0].width());
  const int h = int(mono_depths[0].height());
  AlignmentState init = make_default_init(pairs, int(mono_depths.size()), w, h, intrinsics,
                                          &mono_depths);
  std::vector<Eigen::ArrayXXd> log_offsets;
  OptimizeResult run = run_adam(pairs, std::move(init), config, corr, &log_offsets);

  ScaleMapResult res;
  res.energy_trace = std::move(run.energy_trace);
  res.state.mono_depths = mono_depths;
  res.state.poses = std::move(run.state.poses);
  res.state.intrinsics = std::move(run.state.intrinsics);
  res.state.edge_scales = std::move(run.state.edge_scales);
  res.state.scale_maps.reserve(log_offsets.size());
  for (auto& u : log_offsets) res.state.scale_maps.push_back(u.exp());
  return res;
}

MemoryPairSource::MemoryPairSource(ViewGraph graph, std::vector<PairPrediction> pairs,
                                   int width, int height)
    : graph_(std::move(graph)), pairs_(std::move(pairs)), width_(width), height_(height) {}

std::vector<PairPrediction> MemoryPairSource::load(const std::vector<Edge>& edges) {
  std::vector<PairPrediction> out;
  out.reserve(edges.size());
  for (const Edge& e : edges) {
    auto it = std::find_if(pairs_.begin(), pairs_.end(),
                           [&](const PairPrediction& p) { return p.edge == e; });
    if (it == pairs_.end())
      throw bad_data("pair source: no prediction for edge (" + std::to_string(e.n) + ", " +
                     std::to_string(e.m) + ")");
    out.push_back(*it);
  }
  record_load(long(out.size()));
  return out;
}

namespace {

// Remaps a pair list onto a compact local frame indexing.
std::vector<PairPrediction> to_local(std::vector<PairPrediction> pairs,
                                     const std::map<int, int>& local) {
  for (PairPrediction& p : pairs) {
    p.edge.n = local.at(p.edge.n);
    p.edge.m = local.at(p.edge.m);
  }
  return pairs;
}

std::vector<Intrinsics> subset_intrinsics(const std::vector<Intrinsics>* intrinsics,
                                          const std::vector<int>& frames) {
  std::vector<Intrinsics> out;
  if (!intrinsics) return out;
  out.reserve(frames.size());
  for (int f : frames) out.push_back((*intrinsics)[f]);
  return out;
}

}  // namespace

OptimizeResult optimize_hierarchical(PairSource& source, const OptimConfig& config,
                                     const std::vector<Intrinsics>* intrinsics) {
  config.check();
  const ViewGraph& graph = source.graph();
  const int n = graph.frame_count;
  if (n < 2) throw bad_data("optimize_hierarchical: need at least 2 frames");
  const ClipPartition part = keyframe_partition(
      n, config.clip_length, config.keyframe == KeyframeChoice::Middle);

  OptimConfig stage_config = config;

  // Degenerate partition: single clip, plain global alignment.
  if (part.clips.size() == 1) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    std::vector<PairPrediction> pairs = source.load(edges);
    const AlignmentState init = make_default_init(pairs, n, source.width(), source.height(),
                                                  intrinsics);
    return optimize_global(pairs, init, stage_config);
  }

  OptimizeResult result;
  result.state.poses.assign(n, Pose::identity());
  result.state.depths.assign(n, DepthMap(source.height(), source.width()));
  result.state.intrinsics.assign(n, fallback_intrinsics(source.width(), source.height()));
  result.state.edge_scales = Eigen::VectorXd::Ones(Eigen::Index(graph.edges.size()));
  std::map<Edge, double> sigma_by_edge;

  // Stage 1: global alignment of the keyframe clip.
  const std::vector<int>& keyframes = part.keyframes;
  {
    std::vector<Edge> kf_edges;
    for (size_t a = 0; a < keyframes.size(); ++a)
      for (size_t b = a + 1; b < keyframes.size(); ++b)
        kf_edges.push_back({keyframes[a], keyframes[b]});
    std::map<int, int> local;
    for (size_t i = 0; i < keyframes.size(); ++i) local[keyframes[i]] = int(i);

    std::vector<PairPrediction> pairs = to_local(source.load(kf_edges), local);
    std::vector<Intrinsics> sub_k = subset_intrinsics(intrinsics, keyframes);
    const AlignmentState init =
        make_default_init(pairs, int(keyframes.size()), source.width(), source.height(),
                          sub_k.empty() ? nullptr : &sub_k);
    OptimizeResult stage = optimize_global(pairs, init, stage_config);
    result.pairs_evaluated += stage.pairs_evaluated;
    result.energy_trace.insert(result.energy_trace.end(), stage.energy_trace.begin(),
                               stage.energy_trace.end());
    for (size_t i = 0; i < keyframes.size(); ++i) {
      result.state.depths[keyframes[i]] = stage.state.depths[i];
      result.state.poses[keyframes[i]] = stage.state.poses[i];
      result.state.intrinsics[keyframes[i]] = stage.state.intrinsics[i];
    }
    for (size_t e = 0; e < kf_edges.size(); ++e)
      sigma_by_edge[kf_edges[e]] = stage.state.edge_scales[Eigen::Index(e)];
  }

  // Stage 2: per-clip local alignment with the keyframe frozen.
  OptimConfig clip_config = stage_config;
  clip_config.normalize_edge_scales = false;
  for (size_t ci = 0; ci < part.clips.size(); ++ci) {
    const auto& clip = part.clips[ci];
    const int kf = keyframes[ci];
    if (clip.size() < 2) continue;  // nothing left to align
    std::vector<Edge> edges;
    for (int i = clip.begin; i < clip.end; ++i)
      for (int j = i + 1; j < clip.end; ++j) edges.push_back({i, j});
    std::map<int, int> local;
    std::vector<int> frames;
    for (int i = clip.begin; i < clip.end; ++i) {
      local[i] = i - clip.begin;
      frames.push_back(i);
    }
    std::vector<PairPrediction> pairs = to_local(source.load(edges), local);

    AlignmentState init = make_default_init(pairs, clip.size(), source.width(),
                                            source.height(), nullptr);
    const int kf_local = local.at(kf);
    for (int i = 0; i < clip.size(); ++i) {
      init.poses[i] = result.state.poses[kf];
      init.intrinsics[i] = result.state.intrinsics[kf];
    }
    init.depths[kf_local] = result.state.depths[kf];
    clip_config.frozen_frames = {kf_local};

    OptimizeResult stage = optimize_global(pairs, init, clip_config);
    result.pairs_evaluated += stage.pairs_evaluated;
    result.energy_trace.insert(result.energy_trace.end(), stage.energy_trace.begin(),
                               stage.energy_trace.end());
    for (int i = clip.begin; i < clip.end; ++i) {
      if (i == kf) continue;
      result.state.depths[i] = stage.state.depths[local.at(i)];
      result.state.poses[i] = stage.state.poses[local.at(i)];
      result.state.intrinsics[i] = stage.state.intrinsics[local.at(i)];
    }
    for (size_t e = 0; e < edges.size(); ++e)
      sigma_by_edge[edges[e]] = stage.state.edge_scales[Eigen::Index(e)];
  }

  for (size_t e = 0; e < graph.edges.size(); ++e) {
    auto it = sigma_by_edge.find(graph.edges[e]);
    if (it != sigma_by_edge.end()) result.state.edge_scales[Eigen::Index(e)] = it->second;
  }
  return result;
}

}  // namespace palign
