#include "palign/arch/point_vit.hpp"

#include <cmath>
#include <random>
#include <string>

namespace palign {

namespace {

Eigen::MatrixXd seeded_uniform(Eigen::Index rows, Eigen::Index cols, double bound,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

Eigen::MatrixXd softmax_rows(Eigen::MatrixXd logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - mx).exp();
    logits.row(r) /= logits.row(r).sum();
  }
  return logits;
}

}  // namespace

NormalizedPointMap depth_to_normalized_points(const DepthMap& depth, const Intrinsics* k) {
  if (!depth.valid.any()) throw bad_data("depth_to_normalized_points: empty valid mask");
  const Intrinsics kk =
      k ? *k : fallback_intrinsics(int(depth.width()), int(depth.height()));
  NormalizedPointMap out;
  NormalizeResult<double> res = axis_normalize(unproject(depth, kk));
  out.grid = std::move(res.normalized);
  out.denorm = res.affine;
  return out;
}

PatchEmbedParams PatchEmbedParams::seeded(int patch_size, int channels, int token_rows,
                                          int token_cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(double(channels));
  PatchEmbedParams p;
  p.patch_size = patch_size;
  p.weight = seeded_uniform(3 * patch_size * patch_size, channels, bound, rng);
  p.bias = Eigen::RowVectorXd::Zero(channels);
  p.position = seeded_uniform(Eigen::Index(token_rows) * token_cols, channels, bound, rng);
  return p;
}

TokenGrid patch_embed(const NormalizedPointMap& pm, const PatchEmbedParams& params,
                      bool include_position) {
  const Eigen::Index h = pm.grid.height();
  const Eigen::Index w = pm.grid.width();
  const int p = params.patch_size;
  if (p < 1 || h % p != 0 || w % p != 0)
    throw bad_data("patch_embed: image " + shape_str(h, w) +
                   " not divisible by patch size " + std::to_string(p));
  TokenGrid grid;
  grid.patch_size = p;
  grid.rows = int(h / p);
  grid.cols = int(w / p);
  const Eigen::Index n_tokens = Eigen::Index(grid.rows) * grid.cols;
  if (params.position.rows() != n_tokens || params.weight.cols() < 1)
    throw bad_data("patch_embed: parameters sized for " +
                   std::to_string(params.position.rows()) + " tokens, image yields " +
                   std::to_string(n_tokens));

  grid.tokens.resize(n_tokens, params.weight.cols());
  Eigen::VectorXd flat(3 * p * p);
  for (int py = 0; py < grid.rows; ++py) {
    for (int px = 0; px < grid.cols; ++px) {
      Eigen::Index i = 0;
      for (int dy = 0; dy < p; ++dy)
        for (int dx = 0; dx < p; ++dx) {
          const auto pt = pm.grid.at(py * p + dy, px * p + dx);
          flat[i++] = pt.x();
          flat[i++] = pt.y();
          flat[i++] = pt.z();
        }
      const Eigen::Index t = Eigen::Index(py) * grid.cols + px;
      grid.tokens.row(t) = flat.transpose() * params.weight + params.bias;
      if (include_position) grid.tokens.row(t) += params.position.row(t);
    }
  }
  return grid;
}

AttentionParams AttentionParams::seeded(int channels, int heads, std::uint64_t seed) {
  if (heads < 1 || channels % heads != 0)
    throw bad_data("attention: channels " + std::to_string(channels) +
                   " not divisible by heads " + std::to_string(heads));
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(double(channels));
  AttentionParams p;
  p.heads = heads;
  p.wq = seeded_uniform(channels, channels, bound, rng);
  p.wk = seeded_uniform(channels, channels, bound, rng);
  p.wv = seeded_uniform(channels, channels, bound, rng);
  p.wo = seeded_uniform(channels, channels, bound, rng);
  const int hidden = 4 * channels;
  p.w1 = seeded_uniform(channels, hidden, bound, rng);
  p.b1 = Eigen::RowVectorXd::Zero(hidden);
  p.w2 = seeded_uniform(hidden, channels, bound, rng);
  p.b2 = Eigen::RowVectorXd::Zero(channels);
  return p;
}

std::vector<Eigen::MatrixXd> attention_weights(const Eigen::MatrixXd& tokens,
                                               const AttentionParams& params) {
  const Eigen::Index c = tokens.cols();
  if (params.heads < 1 || c % params.heads != 0)
    throw bad_data("attention: channels " + std::to_string(c) + " not divisible by heads " +
                   std::to_string(params.heads));
  const Eigen::Index dh = c / params.heads;
  const Eigen::MatrixXd q = tokens * params.wq;
  const Eigen::MatrixXd k = tokens * params.wk;
  std::vector<Eigen::MatrixXd> weights;
  weights.reserve(params.heads);
  for (int h = 0; h < params.heads; ++h) {
    const auto qh = q.middleCols(h * dh, dh);
    const auto kh = k.middleCols(h * dh, dh);
    weights.push_back(softmax_rows(qh * kh.transpose() / std::sqrt(double(dh))));
  }
  return weights;
}

Eigen::MatrixXd attention_stage(const Eigen::MatrixXd& tokens,
                                const AttentionParams& params) {
  const Eigen::Index c = tokens.cols();
  const Eigen::Index dh = c / params.heads;
  const std::vector<Eigen::MatrixXd> weights = attention_weights(tokens, params);
  const Eigen::MatrixXd v = tokens * params.wv;
  Eigen::MatrixXd concat(tokens.rows(), c);
  for (int h = 0; h < params.heads; ++h)
    concat.middleCols(h * dh, dh) = weights[h] * v.middleCols(h * dh, dh);
  return tokens + concat * params.wo;
}

Eigen::MatrixXd feed_forward_stage(const Eigen::MatrixXd& tokens,
                                   const AttentionParams& params) {
  Eigen::MatrixXd hidden = (tokens * params.w1).rowwise() + params.b1;
  hidden = hidden.cwiseMax(0.0);  // ReLU
  return tokens + ((hidden * params.w2).rowwise() + params.b2);
}

TokenGrid attention_block(const TokenGrid& tokens, const AttentionParams& params) {
  TokenGrid out = tokens;
  out.tokens = feed_forward_stage(attention_stage(tokens.tokens, params), params);
  return out;
}

FeatureStack make_feature_stack(const TokenGrid& tokens,
                                const std::vector<AttentionParams>& level_params) {
  FeatureStack stack;
  stack.levels.reserve(level_params.size());
  TokenGrid current = tokens;
  for (const AttentionParams& params : level_params) {
    current = attention_block(current, params);
    stack.levels.push_back(current.tokens);
  }
  return stack;
}

DecoderFeatures DecoderFeatures::seeded(int levels, int tokens, int channels,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DecoderFeatures d;
  for (int l = 0; l < levels; ++l)
    d.levels.push_back(seeded_uniform(tokens, channels, 1.0, rng));
  return d;
}

ZeroConvParams ZeroConvParams::zeros(int levels, int channels) {
  ZeroConvParams p;
  for (int l = 0; l < levels; ++l) {
    p.weight.push_back(Eigen::MatrixXd::Zero(channels, channels));
    p.bias.push_back(Eigen::RowVectorXd::Zero(channels));
  }
  return p;
}

DecoderFeatures zero_conv_inject(const FeatureStack& f, const DecoderFeatures& e,
                                 const ZeroConvParams& params) {
  if (f.levels.size() != e.levels.size() || f.levels.size() != params.weight.size())
    throw bad_data("zero_conv_inject: level counts disagree");
  DecoderFeatures out;
  out.levels.reserve(e.levels.size());
  for (size_t l = 0; l < e.levels.size(); ++l) {
    if (f.levels[l].rows() != e.levels[l].rows() ||
        f.levels[l].cols() != e.levels[l].cols())
      throw bad_data("zero_conv_inject: shape mismatch at level " + std::to_string(l));
    out.levels.push_back(e.levels[l] +
                         ((f.levels[l] * params.weight[l]).rowwise() + params.bias[l]));
  }
  return out;
}

}  // namespace palign
