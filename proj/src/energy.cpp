#include "palign/align/energy.hpp"

#include <cmath>
#include <string>
#include <thread>

#include "palign/core/kahan.hpp"
#include "palign/geom/camera.hpp"

namespace palign {

namespace {

void check_pair(const AlignmentState& state, const PairPrediction& pair) {
  const int n_frames = state.frame_count();
  if (pair.edge.n < 0 || pair.edge.n >= n_frames || pair.edge.m < 0 ||
      pair.edge.m >= n_frames || pair.edge.n == pair.edge.m)
    throw bad_data("alignment: edge (" + std::to_string(pair.edge.n) + ", " +
                   std::to_string(pair.edge.m) + ") out of range for " +
                   std::to_string(n_frames) + " frames");
  for (int v : {pair.edge.n, pair.edge.m}) {
    const DepthMap& d = state.depths[v];
    if (d.width() != pair.x_n.width() || d.height() != pair.x_n.height())
      throw bad_data("alignment: edge (" + std::to_string(pair.edge.n) + ", " +
                     std::to_string(pair.edge.m) + ") grids " +
                     shape_str(pair.x_n.height(), pair.x_n.width()) +
                     " do not match frame " + std::to_string(v) + " depth " +
                     shape_str(d.height(), d.width()));
  }
}

// Accumulates one edge's energy (and gradient when grad != nullptr).
void accumulate_edge(const AlignmentState& state, const PairPrediction& pair,
                     double sigma, Eigen::Index edge_index, const OptimConfig& config,
                     EnergyGradient* grad, KahanSum& energy) {
  const int n = pair.edge.n;
  const int m = pair.edge.m;
  const Eigen::Matrix3d& rn = state.poses[n].rotation();
  const Eigen::Matrix3d& rm = state.poses[m].rotation();
  const Eigen::Vector3d& tn = state.poses[n].translation();
  const Eigen::Vector3d& tm = state.poses[m].translation();

  for (int side = 0; side < 2; ++side) {
    const int v = side == 0 ? n : m;
    const bool is_ref = side == 0;
    const PointMap& pred = is_ref ? pair.x_n : pair.x_m;
    const ConfidenceMap& conf = is_ref ? pair.c_n : pair.c_m;
    const DepthMap& depth = state.depths[v];
    const Intrinsics& k = state.intrinsics[v];

    // view v camera frame -> reference (n) camera frame
    const Eigen::Matrix3d a = is_ref ? Eigen::Matrix3d::Identity()
                                     : Eigen::Matrix3d(rn.transpose() * rm);
    const Eigen::Vector3d b =
        is_ref ? Eigen::Vector3d::Zero() : Eigen::Vector3d(rn.transpose() * (tm - tn));
    // reference frame -> view v, for depth-only mode
    const Eigen::Matrix3d a_back = is_ref ? Eigen::Matrix3d::Identity()
                                          : Eigen::Matrix3d(rm.transpose() * rn);
    const Eigen::Vector3d b_back =
        is_ref ? Eigen::Vector3d::Zero() : Eigen::Vector3d(rm.transpose() * (tn - tm));

    for (Eigen::Index y = 0; y < depth.height(); ++y) {
      for (Eigen::Index x = 0; x < depth.width(); ++x) {
        if (!depth.valid(y, x) || !pred.valid(y, x)) continue;
        const double w = conf.weights(y, x);
        if (w == 0.0) continue;
        const double d = depth.values(y, x);
        const Eigen::Vector3d ray = pixel_ray<double>(k, double(x), double(y));
        const Eigen::Vector3d y_pt = d * ray;

        if (config.residual == ResidualMode::ThreeD) {
          const Eigen::Vector3d z = a * y_pt + b;
          const Eigen::Vector3d r = z / sigma - pred.at(y, x);
          energy.add(w * r.squaredNorm());
          if (!grad) continue;
          const double wc = 2.0 * w;
          const Eigen::Vector3d ra = a.transpose() * r;
          grad->depth[v](y, x) += wc * ra.dot(ray) / sigma;
          grad->focal[v] += wc * (ra.x() * y_pt.x() + ra.y() * y_pt.y()) *
                            (-1.0 / k.fx) / sigma;
          grad->log_scale[edge_index] += -wc * r.dot(z) / sigma;
          if (!is_ref) {
            const Eigen::Vector3d w_pt = rm * y_pt + tm;
            const Eigen::Vector3d u = (wc / sigma) * (rn * r);
            Vector6d g;
            g.head<3>() = u;
            g.tail<3>() = w_pt.cross(u);
            grad->pose[m] += g;
            grad->pose[n] -= g;
          }
        } else {
          // depth-only: compare D_v against the z of the sigma-scaled
          // prediction mapped into view v, in prediction units
          const Eigen::Vector3d z_pt = a_back * (sigma * pred.at(y, x)) + b_back;
          const double r = (d - z_pt.z()) / sigma;
          energy.add(w * r * r);
          if (!grad) continue;
          const double wc = 2.0 * w;
          grad->depth[v](y, x) += wc * r / sigma;
          grad->log_scale[edge_index] += -wc * r * (d - b_back.z()) / sigma;
          if (!is_ref) {
            const Eigen::Vector3d w_pt = rn * (sigma * pred.at(y, x)) + tn;
            const Eigen::Vector3d q = -(wc * r / sigma) * rm.col(2);
            Vector6d g;
            g.head<3>() = q;
            g.tail<3>() = w_pt.cross(q);
            grad->pose[n] += g;
            grad->pose[m] -= g;
          }
        }
      }
    }
  }
}

template <typename PerEdge>
void for_each_edge(const std::vector<PairPrediction>& pairs, int threads, PerEdge fn) {
  const Eigen::Index count = Eigen::Index(pairs.size());
  if (threads <= 1 || count < 2) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  const int n_threads = int(std::min<Eigen::Index>(threads, count));
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int tid = 0; tid < n_threads; ++tid) {
    const Eigen::Index begin = count * tid / n_threads;
    const Eigen::Index end = count * (tid + 1) / n_threads;
    workers.emplace_back([=, &fn]() {
      for (Eigen::Index i = begin; i < end; ++i) fn(i, tid);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace

EnergyGradient EnergyGradient::zero(const AlignmentState& state) {
  EnergyGradient g;
  g.depth.reserve(state.depths.size());
  for (const DepthMap& d : state.depths)
    g.depth.push_back(Eigen::ArrayXXd::Zero(d.height(), d.width()));
  g.pose.assign(state.poses.size(), Vector6d::Zero());
  g.focal = Eigen::VectorXd::Zero(state.frame_count());
  g.log_scale = Eigen::VectorXd::Zero(state.edge_scales.size());
  return g;
}

void EnergyGradient::merge(const EnergyGradient& other) {
  energy += other.energy;
  for (size_t i = 0; i < depth.size(); ++i) depth[i] += other.depth[i];
  for (size_t i = 0; i < pose.size(); ++i) pose[i] += other.pose[i];
  focal += other.focal;
  log_scale += other.log_scale;
}

void EnergyGradient::scale_to_log_depth(const AlignmentState& state) {
  for (size_t i = 0; i < depth.size(); ++i) depth[i] *= state.depths[i].values;
}

double total_energy(const AlignmentState& state, const std::vector<PairPrediction>& pairs,
                    const OptimConfig& config) {
  if (Eigen::Index(pairs.size()) != state.edge_scales.size())
    throw bad_data("total_energy: " + std::to_string(pairs.size()) + " pairs but " +
                   std::to_string(state.edge_scales.size()) + " edge scales");
  for (const auto& pair : pairs) check_pair(state, pair);

  const int n_threads = std::max(1, config.threads);
  std::vector<KahanSum> partial(std::max<size_t>(1, n_threads));
  for_each_edge(pairs, n_threads, [&](Eigen::Index i, int tid) {
    accumulate_edge(state, pairs[i], state.edge_scales[i], i, config, nullptr,
                    partial[tid]);
  });
  KahanSum total;
  for (const KahanSum& p : partial) total.merge(p);
  return total.value();
}

EnergyGradient energy_gradient(const AlignmentState& state,
                               const std::vector<PairPrediction>& pairs,
                               const OptimConfig& config) {
  if (Eigen::Index(pairs.size()) != state.edge_scales.size())
    throw bad_data("energy_gradient: " + std::to_string(pairs.size()) + " pairs but " +
                   std::to_string(state.edge_scales.size()) + " edge scales");
  for (const auto& pair : pairs) check_pair(state, pair);

  const int n_threads = std::max(1, config.threads);
  std::vector<EnergyGradient> grads(std::max<size_t>(1, n_threads));
  std::vector<KahanSum> partial(grads.size());
  for (auto& g : grads) g = EnergyGradient::zero(state);
  for_each_edge(pairs, n_threads, [&](Eigen::Index i, int tid) {
    accumulate_edge(state, pairs[i], state.edge_scales[i], i, config, &grads[tid],
                    partial[tid]);
  });
  for (size_t tid = 1; tid < grads.size(); ++tid) grads[0].merge(grads[tid]);
  KahanSum total;
  for (const KahanSum& p : partial) total.merge(p);
  grads[0].energy = total.value();
  return std::move(grads[0]);
}

AlignmentState apply_similarity(const AlignmentState& state, const Sim3& g) {
  AlignmentState out = state;
  for (auto& d : out.depths) d.values *= g.scale;
  for (auto& p : out.poses) p = g.apply(p);
  out.edge_scales *= g.scale;
  return out;
}

}  // namespace palign
