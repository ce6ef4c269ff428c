#include "funcgraph/views/view_selection.hpp"

#include "funcgraph/error.hpp"

#include <algorithm>
#include <cmath>

namespace funcgraph {

void FrameRecord::validate() const {
  intrinsics.validate();
  if (depth && (depth->width != intrinsics.width || depth->height != intrinsics.height ||
                depth->values.size() != static_cast<std::size_t>(depth->width) * depth->height)) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame " + std::to_string(frame_id) + ": depth raster size differs from intrinsics");
  }
}

std::optional<Projection> visible_projection(const Vec3& point, const FrameRecord& frame,
                                             double depth_tol) {
  auto proj = try_project(point, frame.cam_pose, frame.intrinsics);
  if (!proj) return std::nullopt;
  auto pixel = frame.intrinsics.pixel_index(proj->pixel);
  if (!pixel) return std::nullopt;
  if (frame.depth) {
    const float raster = frame.depth->at(pixel->first, pixel->second);
    if (!DepthImage::is_valid(raster)) return std::nullopt;
    if (std::abs(proj->depth - static_cast<double>(raster)) > depth_tol) return std::nullopt;
  }
  return proj;
}

std::size_t count_visible(std::span<const Vec3> points, const FrameRecord& frame, double depth_tol) {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [&](const Vec3& p) {
    return visible_projection(p, frame, depth_tol).has_value();
  }));
}

ContributionScore frame_contribution(std::span<const Vec3> object_points, const FrameRecord& frame,
                                     double depth_tol, NodeId object_id) {
  if (object_points.empty()) throw Error(ErrorCode::EmptyPointCloud, "object has no points");
  if (!(depth_tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "depth_tol must be positive");
  const std::size_t valid = count_visible(object_points, frame, depth_tol);
  return {frame.frame_id, object_id,
          static_cast<double>(valid) / static_cast<double>(object_points.size())};
}

std::vector<int> select_top_k(std::span<const ContributionScore> scores, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
  std::vector<ContributionScore> ranked;
  for (const auto& s : scores) {
    if (s.score > 0.0) ranked.push_back(s);
  }
  std::sort(ranked.begin(), ranked.end(), [](const ContributionScore& a, const ContributionScore& b) {
    return a.score != b.score ? a.score > b.score : a.frame_id < b.frame_id;
  });
  std::vector<int> out;
  for (std::size_t i = 0; i < ranked.size() && out.size() < static_cast<std::size_t>(k); ++i) {
    out.push_back(ranked[i].frame_id);
  }
  return out;
}

Feature aggregate_features(std::span<const Feature> features, std::span<const double> scores) {
  if (features.empty() || features.size() != scores.size()) {
    throw Error(ErrorCode::DimensionMismatch, "features and scores must be non-empty and equal length");
  }
  const Eigen::Index dim = features.front().size();
  Feature sum = Feature::Zero(dim);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) throw Error(ErrorCode::DimensionMismatch, "mixed feature dimensions");
    if (!(scores[i] >= 0.0)) throw Error(ErrorCode::ZeroWeightSum, "scores must be non-negative");
    sum += scores[i] * features[i];
    weight_sum += scores[i];
  }
  if (!(weight_sum > 0.0)) throw Error(ErrorCode::ZeroWeightSum, "scores sum to zero");
  const double norm = sum.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroWeightSum, "weighted features cancel out");
  return sum / norm;
}

}  // namespace funcgraph
