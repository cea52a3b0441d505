#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace palign {

// Ordered frame pair; n is the reference frame whose camera coordinates host
// both point maps of the pair.
struct Edge {
  int n = 0;
  int m = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class PairStrategy { SymmetricWindow, StridedWindow, Hierarchical };

struct StrategyDescriptor {
  PairStrategy kind = PairStrategy::SymmetricWindow;
  int window = 10;       // SymmetricWindow / StridedWindow
  int stride = 2;        // StridedWindow
  int clip_length = 10;  // Hierarchical
  bool keyframe_middle = false;  // Hierarchical: middle frame instead of first

  std::string name() const;
};

struct ViewGraph {
  int frame_count = 0;
  std::vector<Edge> edges;  // lexicographic by (n, m), no duplicates
  StrategyDescriptor strategy;
};

// Contiguous clips of length <= M covering [0, N) exactly once, one keyframe
// per clip.
struct ClipPartition {
  struct Clip {
    int begin = 0;  // inclusive
    int end = 0;    // exclusive
    int size() const { return end - begin; }
    bool contains(int f) const { return f >= begin && f < end; }
  };
  std::vector<Clip> clips;
  std::vector<int> keyframes;
};

// Enumerates the edge set of a strategy. Counts follow the closed forms:
// symmetric-window(w) walks offsets 1..w with cyclic wrap and both orders,
// strided-window(s, w) walks offsets 1, 1+s, ..., 1+(w-1)s without wrap,
// hierarchical(M) pairs all keyframes plus all unordered within-clip pairs.
ViewGraph enumerate_pairs(int frame_count, const StrategyDescriptor& strategy);

ClipPartition keyframe_partition(int frame_count, int clip_length,
                                 bool keyframe_middle = false);

// Uniformly samples a temporal stride in {1..10} (clamped to the valid range)
// and a start frame; deterministic under the seed.
class TrainingPairSampler {
 public:
  TrainingPairSampler(int frame_count, std::uint64_t seed);
  Edge next();

 private:
  int frame_count_;
  int max_stride_;
  std::mt19937_64 rng_;
};

// True when every frame is reachable from frame 0 through the edge set.
bool is_connected(const ViewGraph& graph);

}  // namespace palign
