#pragma once

#include "funcgraph/articulation/articulation_fit.hpp"
#include "funcgraph/graph/scene_graph.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>

namespace funcgraph {

inline constexpr double kDefaultAssociationThreshold = 0.10;
inline constexpr const char* kInteractionLabel = "articulated-part";

enum class ParentSelection { Centroid, PointCloud };

struct RefineConfig {
  double threshold = kDefaultAssociationThreshold;
  ParentSelection parent_selection = ParentSelection::Centroid;
  std::string interaction_label = kInteractionLabel;

  void validate() const;
};

struct Association {
  std::optional<NodeId> element_id;  // nearest element, none for an element-free graph
  double distance = std::numeric_limits<double>::infinity();
};

enum class AssociationKind { Matched, NewNode };

struct AssociationResult {
  AssociationKind kind = AssociationKind::NewNode;
  NodeId element_id = 0;
  NodeId parent_object_id = 0;
  double distance = std::numeric_limits<double>::infinity();  // to the nearest prior centroid
};

// Nearest element centroid to the trajectory start, ties by lowest id. Throws
// EmptyTrajectory, InvalidConfig for threshold <= 0.
Association associate(const SceneGraph& graph, std::span<const Pose> trajectory, double threshold);

// Nearest object to `point`. Throws EmptyGraph when there are no objects.
NodeId nearest_object(const SceneGraph& graph, const Vec3& point,
                      ParentSelection selection = ParentSelection::Centroid);

// Attaches the verdict's axis and the trajectory to the matched element, or
// creates an interaction element at the trajectory start under the nearest
// object. Throws EmptyTrajectory, EmptyGraph, TrajectoryTooShort.
AssociationResult register_demonstration(SceneGraph& graph, std::span<const Pose> trajectory,
                                         const JointVerdict& verdict, const RefineConfig& config = {});

}  // namespace funcgraph
