#include "funcgraph/bench/metrics.hpp"

#include "funcgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <tuple>

namespace funcgraph {

double trajectory_rmse(std::span<const Pose> est, std::span<const Pose> gt) {
  if (est.size() != gt.size()) {
    throw Error(ErrorCode::LengthMismatch, "estimate has " + std::to_string(est.size()) +
                                               " poses, ground truth " + std::to_string(gt.size()));
  }
  if (est.empty()) throw Error(ErrorCode::LengthMismatch, "empty trajectories");
  double sq = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) sq += (est[i].position() - gt[i].position()).squaredNorm();
  return std::sqrt(sq / static_cast<double>(est.size()));
}

AlignedRmse trajectory_rmse_aligned(std::span<const TimedPose> est, std::span<const TimedPose> gt,
                                    double tolerance) {
  std::vector<const TimedPose*> sorted;
  for (const auto& g : gt) sorted.push_back(&g);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TimedPose* a, const TimedPose* b) { return a->timestamp < b->timestamp; });
  AlignedRmse out;
  double sq = 0.0;
  for (const auto& e : est) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), e.timestamp,
                               [](const TimedPose* g, double t) { return g->timestamp < t; });
    const TimedPose* best = nullptr;
    double best_dt = std::numeric_limits<double>::infinity();
    if (it != sorted.end()) {
      best = *it;
      best_dt = (*it)->timestamp - e.timestamp;
    }
    if (it != sorted.begin() && e.timestamp - (*std::prev(it))->timestamp < best_dt) {
      best = *std::prev(it);
      best_dt = e.timestamp - best->timestamp;
    }
    if (best == nullptr || best_dt > tolerance) {
      ++out.unmatched;
      continue;
    }
    sq += (e.pose.position() - best->pose.position()).squaredNorm();
    ++out.matched;
  }
  if (out.matched == 0) throw Error(ErrorCode::LengthMismatch, "no estimate aligns with the ground truth");
  out.rmse = std::sqrt(sq / static_cast<double>(out.matched));
  return out;
}

double axis_angular_error(const Vec3& est_dir, const Vec3& gt_dir) {
  // atan2 form of arccos(|a.b|); stays accurate for nearly parallel axes
  const double s = est_dir.cross(gt_dir).norm();
  const double c = std::abs(est_dir.dot(gt_dir));
  return std::atan2(s, c) * 180.0 / std::numbers::pi;
}

double axis_position_error(const ArticulationAxis& est, const ArticulationAxis& gt) {
  if (est.joint_type != JointType::Revolute || gt.joint_type != JointType::Revolute) {
    throw Error(ErrorCode::JointTypeMismatch, "axis position error needs two revolute axes");
  }
  return (est.center - gt.center).cross(gt.direction.normalized()).norm();
}

DetectionScores detection_prf(std::span<const Vec3> predicted, std::span<const Vec3> gt, double match_dist) {
  if (!(match_dist > 0.0)) throw Error(ErrorCode::InvalidConfig, "match distance must be positive");
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      const double d = (predicted[i] - gt[j]).norm();
      if (d <= match_dist) pairs.emplace_back(d, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> pred_used(predicted.size(), false);
  std::vector<bool> gt_used(gt.size(), false);
  DetectionScores s;
  for (const auto& [d, i, j] : pairs) {
    if (pred_used[i] || gt_used[j]) continue;
    pred_used[i] = true;
    gt_used[j] = true;
    ++s.matched;
  }
  const double m = static_cast<double>(s.matched);
  s.precision = predicted.empty() ? 0.0 : m / static_cast<double>(predicted.size());
  s.recall = gt.empty() ? 0.0 : m / static_cast<double>(gt.size());
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

double recall_at_k(const SceneGraph& graph, std::span<const RetrievalQuery> queries, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
  if (queries.empty()) throw Error(ErrorCode::InvalidConfig, "no queries");
  std::size_t hits = 0;
  for (const auto& [feature, target] : queries) {
    const auto ranked = graph.query(feature, k);
    if (std::any_of(ranked.begin(), ranked.end(), [&](const QueryHit& h) { return h.id == target; })) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(queries.size());
}

}  // namespace funcgraph
