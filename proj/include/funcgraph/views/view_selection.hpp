#pragma once

#include "funcgraph/graph/scene_graph.hpp"
#include "funcgraph/views/frame.hpp"

#include <optional>
#include <span>
#include <vector>

namespace funcgraph {

inline constexpr double kDefaultDepthTolerance = 0.03;  // meters
inline constexpr int kDefaultTopK = 5;

struct ContributionScore {
  int frame_id = 0;
  NodeId object_id = 0;
  double score = 0.0;  // valid points / total points
};

// Projection of `point` if it lands on an image pixel in front of the camera
// and, when the frame has depth, agrees with the raster at the nearest pixel
// within depth_tol. A point over an invalid depth pixel is not visible.
std::optional<Projection> visible_projection(const Vec3& point, const FrameRecord& frame,
                                             double depth_tol);

std::size_t count_visible(std::span<const Vec3> points, const FrameRecord& frame, double depth_tol);

ContributionScore frame_contribution(std::span<const Vec3> object_points, const FrameRecord& frame,
                                     double depth_tol = kDefaultDepthTolerance,
                                     NodeId object_id = 0);

// Frame ids of the k best scores, best first, ties by ascending frame id.
// Zero scores are never selected.
std::vector<int> select_top_k(std::span<const ContributionScore> scores, int k);

// normalize(sum_i s_i * f_i). Throws ZeroWeightSum, DimensionMismatch.
Feature aggregate_features(std::span<const Feature> features, std::span<const double> scores);

}  // namespace funcgraph
