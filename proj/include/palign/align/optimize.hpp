#pragma once

#include <memory>
#include <vector>

#include "palign/align/correspondence.hpp"
#include "palign/align/energy.hpp"
#include "palign/align/types.hpp"

namespace palign {

class DivergenceError : public Error {
 public:
  explicit DivergenceError(int iteration)
      : Error(ErrorCode::Internal, "optimization diverged: non-finite energy at iteration " +
                                       std::to_string(iteration)),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct OptimizeResult {
  AlignmentState state;
  std::vector<double> energy_trace;  // objective before each step, plus final
  long pairs_evaluated = 0;
  int corr_skipped = 0;
};

struct ScaleMapResult {
  ScaleMapState state;
  std::vector<double> energy_trace;
};

double scheduled_lr(const OptimConfig& config, int iteration);

// Poses at identity, edge scales at 1, depth as a per-frame median-depth
// constant read off the incident point maps (or the supplied monocular
// depth), focal from the fixed fallback unless intrinsics are given.
AlignmentState make_default_init(const std::vector<PairPrediction>& pairs,
                                 int frame_count, int width, int height,
                                 const std::vector<Intrinsics>* intrinsics = nullptr,
                                 const std::vector<DepthMap>* mono_depths = nullptr);

// Adam with the configured learning-rate schedule over log-depth, pose
// twists, log-focal and log-sigma. Edge scales are renormalized to unit
// product after every step by a gauge rescale of (sigma, depths, pose
// translations), which leaves the energy unchanged.
OptimizeResult optimize_global(const std::vector<PairPrediction>& pairs,
                               const AlignmentState& init, const OptimConfig& config,
                               const CorrespondenceSet* corr = nullptr);

// Same optimizer, but depth is realized as S_v .* mono_depth_v with the scale
// maps S_v as the per-pixel unknowns (in log space).
ScaleMapResult optimize_scale_maps(const std::vector<PairPrediction>& pairs,
                                   const std::vector<DepthMap>& mono_depths,
                                   const OptimConfig& config,
                                   const std::vector<Intrinsics>* intrinsics = nullptr,
                                   const CorrespondenceSet* corr = nullptr);

// Demand-paged access to pair predictions so the hierarchical scheme never
// holds more than one stage's pair set in memory.
class PairSource {
 public:
  virtual ~PairSource() = default;
  virtual const ViewGraph& graph() const = 0;
  virtual int width() const = 0;
  virtual int height() const = 0;
  virtual std::vector<PairPrediction> load(const std::vector<Edge>& edges) = 0;

  long total_pairs_served() const { return total_served_; }
  long max_pairs_resident() const { return max_single_load_; }

 protected:
  void record_load(long count) {
    total_served_ += count;
    max_single_load_ = std::max(max_single_load_, count);
  }

 private:
  long total_served_ = 0;
  long max_single_load_ = 0;
};

class MemoryPairSource : public PairSource {
 public:
  MemoryPairSource(ViewGraph graph, std::vector<PairPrediction> pairs, int width,
                   int height);
  const ViewGraph& graph() const override { return graph_; }
  int width() const override { return width_; }
  int height() const override { return height_; }
  std::vector<PairPrediction> load(const std::vector<Edge>& edges) override;

 private:
  ViewGraph graph_;
  std::vector<PairPrediction> pairs_;
  int width_, height_;
};

// Two-stage scheme: global alignment of the keyframe clip first, then one
// local alignment per clip with the keyframe's variables frozen. The source's
// graph must contain the hierarchical edge set for config.clip_length.
OptimizeResult optimize_hierarchical(PairSource& source, const OptimConfig& config,
                                     const std::vector<Intrinsics>* intrinsics = nullptr);

}  // namespace palign
