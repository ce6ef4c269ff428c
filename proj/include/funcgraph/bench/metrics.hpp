#pragma once

#include "funcgraph/graph/scene_graph.hpp"

#include <span>
#include <utility>
#include <vector>

namespace funcgraph {

inline constexpr double kDefaultMatchDistance = 0.10;

// Position RMSE between equal-length sequences. Throws LengthMismatch.
double trajectory_rmse(std::span<const Pose> est, std::span<const Pose> gt);

struct AlignedRmse {
  double rmse = 0.0;
  std::size_t matched = 0;
  std::size_t unmatched = 0;  // estimates with no ground truth within tolerance
};

// Pairs every estimate with the nearest ground-truth timestamp within
// `tolerance` seconds; unpaired estimates are excluded and counted. Throws
// LengthMismatch when nothing pairs.
AlignedRmse trajectory_rmse_aligned(std::span<const TimedPose> est, std::span<const TimedPose> gt,
                                    double tolerance);

// Angle between two axis lines in degrees, independent of either sign.
double axis_angular_error(const Vec3& est_dir, const Vec3& gt_dir);

// Distance from the estimated center to the ground-truth axis line. Throws
// JointTypeMismatch unless both axes are revolute.
double axis_position_error(const ArticulationAxis& est, const ArticulationAxis& gt);

struct DetectionScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matched = 0;
};

// Greedy one-to-one matching in ascending centroid distance; a pair counts
// when its distance is at most match_dist. Throws InvalidConfig for
// match_dist <= 0.
DetectionScores detection_prf(std::span<const Vec3> predicted, std::span<const Vec3> gt,
                              double match_dist = kDefaultMatchDistance);

using RetrievalQuery = std::pair<Feature, NodeId>;

// Fraction of queries whose ground-truth node is in the top k. Throws
// DimensionMismatch, InvalidConfig for k < 1 or no queries.
double recall_at_k(const SceneGraph& graph, std::span<const RetrievalQuery> queries, int k);

}  // namespace funcgraph
