#include "palign/graph/viewgraph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "palign/core/error.hpp"

namespace palign {

std::string StrategyDescriptor::name() const {
  switch (kind) {
    case PairStrategy::SymmetricWindow:
      return "window(" + std::to_string(window) + ")";
    case PairStrategy::StridedWindow:
      return "strided(" + std::to_string(stride) + "," + std::to_string(window) + ")";
    case PairStrategy::Hierarchical:
      return "hierarchical(" + std::to_string(clip_length) + ")";
  }
  return "?";
}

ViewGraph enumerate_pairs(int frame_count, const StrategyDescriptor& strategy) {
  if (frame_count < 2)
    throw bad_data("enumerate_pairs: need at least 2 frames, got " +
                   std::to_string(frame_count));
  std::set<Edge> edges;
  switch (strategy.kind) {
    case PairStrategy::SymmetricWindow: {
      if (strategy.window < 1) throw bad_data("enumerate_pairs: window must be >= 1");
      for (int i = 0; i < frame_count; ++i) {
        for (int k = 1; k <= strategy.window; ++k) {
          const int j = (i + k) % frame_count;
          if (j == i) continue;
          edges.insert({i, j});
          edges.insert({j, i});
        }
      }
      break;
    }
    case PairStrategy::StridedWindow: {
      if (strategy.window < 1 || strategy.stride < 1)
        throw bad_data("enumerate_pairs: stride and window must be >= 1");
      for (int i = 0; i < frame_count; ++i) {
        for (int q = 0; q < strategy.window; ++q) {
          const int j = i + 1 + strategy.stride * q;
          if (j >= frame_count) break;
          edges.insert({i, j});
          edges.insert({j, i});
        }
      }
      break;
    }
    case PairStrategy::Hierarchical: {
      const ClipPartition part = keyframe_partition(
          frame_count, std::min(strategy.clip_length, frame_count),
          strategy.keyframe_middle);
      for (size_t a = 0; a < part.keyframes.size(); ++a)
        for (size_t b = a + 1; b < part.keyframes.size(); ++b)
          edges.insert({part.keyframes[a], part.keyframes[b]});
      for (const auto& clip : part.clips)
        for (int i = clip.begin; i < clip.end; ++i)
          for (int j = i + 1; j < clip.end; ++j) edges.insert({i, j});
      break;
    }
  }
  ViewGraph graph;
  graph.frame_count = frame_count;
  graph.strategy = strategy;
  graph.edges.assign(edges.begin(), edges.end());
  return graph;
}

ClipPartition keyframe_partition(int frame_count, int clip_length, bool keyframe_middle) {
  if (clip_length < 2)
    throw bad_data("keyframe_partition: clip length must be >= 2, got " +
                   std::to_string(clip_length));
  ClipPartition part;
  for (int begin = 0; begin < frame_count; begin += clip_length) {
    ClipPartition::Clip clip;
    clip.begin = begin;
    clip.end = std::min(begin + clip_length, frame_count);
    part.clips.push_back(clip);
    part.keyframes.push_back(keyframe_middle ? (clip.begin + clip.end - 1) / 2
                                             : clip.begin);
  }
  return part;
}

TrainingPairSampler::TrainingPairSampler(int frame_count, std::uint64_t seed)
    : frame_count_(frame_count),
      max_stride_(std::min(10, frame_count - 1)),
      rng_(seed) {
  if (frame_count < 2)
    throw bad_data("TrainingPairSampler: need at least 2 frames");
}

Edge TrainingPairSampler::next() {
  std::uniform_int_distribution<int> stride_dist(1, max_stride_);
  const int s = stride_dist(rng_);
  std::uniform_int_distribution<int> start_dist(0, frame_count_ - 1 - s);
  const int i = start_dist(rng_);
  return {i, i + s};
}

bool is_connected(const ViewGraph& graph) {
  std::vector<int> parent(graph.frame_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : graph.edges) parent[find(e.n)] = find(e.m);
  for (int f = 1; f < graph.frame_count; ++f)
    if (find(f) != find(0)) return false;
  return true;
}

}  // namespace palign
