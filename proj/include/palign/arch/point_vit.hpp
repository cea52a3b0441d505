#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "palign/geom/camera.hpp"
#include "palign/geom/grids.hpp"
#include "palign/geom/intrinsics.hpp"

namespace palign {

// Point map with every axis mapped onto [-1, 1], plus the affine parameters
// needed to undo it.
struct NormalizedPointMap {
  PointMap grid;
  AxisAffine<double> denorm;
};

// Unproject a depth map (with the fixed-focal fallback when no intrinsics are
// given) and normalize each axis independently.
NormalizedPointMap depth_to_normalized_points(const DepthMap& depth,
                                              const Intrinsics* k = nullptr);

// Token grid produced by patch embedding; tokens are rows of an
// (H' W') x C matrix with token index t = py * W' + px.
struct TokenGrid {
  Eigen::MatrixXd tokens;
  int rows = 0;  // H' = H / patch_size
  int cols = 0;  // W' = W / patch_size
  int patch_size = 0;
};

struct PatchEmbedParams {
  Eigen::MatrixXd weight;    // (3 patch^2) x C
  Eigen::RowVectorXd bias;   // C
  Eigen::MatrixXd position;  // (H' W') x C learned position term
  int patch_size = 16;

  static PatchEmbedParams seeded(int patch_size, int channels, int token_rows,
                                 int token_cols, std::uint64_t seed);
};

TokenGrid patch_embed(const NormalizedPointMap& pm, const PatchEmbedParams& params,
                      bool include_position = true);

struct AttentionParams {
  Eigen::MatrixXd wq, wk, wv, wo;  // C x C
  Eigen::MatrixXd w1, w2;          // C x hidden, hidden x C
  Eigen::RowVectorXd b1, b2;
  int heads = 4;

  static AttentionParams seeded(int channels, int heads, std::uint64_t seed);
};

// Softmax attention matrices per head, rows summing to one. Exposed for the
// normalization and brute-force checks.
std::vector<Eigen::MatrixXd> attention_weights(const Eigen::MatrixXd& tokens,
                                               const AttentionParams& params);

Eigen::MatrixXd attention_stage(const Eigen::MatrixXd& tokens,
                                const AttentionParams& params);
Eigen::MatrixXd feed_forward_stage(const Eigen::MatrixXd& tokens,
                                   const AttentionParams& params);

// Multi-head self-attention with residual, then a two-layer feed-forward with
// residual. No position term inside, so the block is permutation-equivariant
// over tokens.
TokenGrid attention_block(const TokenGrid& tokens, const AttentionParams& params);

// Multi-level features collected after each of s stacked attention blocks.
struct FeatureStack {
  std::vector<Eigen::MatrixXd> levels;
};

FeatureStack make_feature_stack(const TokenGrid& tokens,
                                const std::vector<AttentionParams>& level_params);

// Stand-in for the host decoder's activations; only the shapes and the
// injection contract matter here.
struct DecoderFeatures {
  std::vector<Eigen::MatrixXd> levels;

  static DecoderFeatures seeded(int levels, int tokens, int channels,
                                std::uint64_t seed);
};

struct ZeroConvParams {
  std::vector<Eigen::MatrixXd> weight;   // C x C per level, 1x1 convolution
  std::vector<Eigen::RowVectorXd> bias;  // C per level

  // Freshly constructed parameters are exactly zero, so injection starts as
  // the identity on the decoder features.
  static ZeroConvParams zeros(int levels, int channels);
};

DecoderFeatures zero_conv_inject(const FeatureStack& f, const DecoderFeatures& e,
                                 const ZeroConvParams& params);

}  // namespace palign
