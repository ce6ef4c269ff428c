#include "funcgraph/refinement/refinement.hpp"

#include "funcgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace funcgraph {

void RefineConfig::validate() const {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw Error(ErrorCode::InvalidConfig, "association threshold must be positive and finite");
  }
}

Association associate(const SceneGraph& graph, std::span<const Pose> trajectory, double threshold) {
  if (trajectory.empty()) throw Error(ErrorCode::EmptyTrajectory, "demonstration has no poses");
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "association threshold must be positive");
  const Vec3& start = trajectory.front().position();
  Association best;
  // elements() iterates in ascending id, so a strict comparison keeps the lowest id on ties
  for (const auto& [id, element] : graph.elements()) {
    const double d = (element.centroid - start).norm();
    if (d < best.distance) {
      best.distance = d;
      best.element_id = id;
    }
  }
  return best;
}

NodeId nearest_object(const SceneGraph& graph, const Vec3& point, ParentSelection selection) {
  if (graph.objects().empty()) throw Error(ErrorCode::EmptyGraph, "graph has no object nodes");
  NodeId best_id = graph.objects().begin()->first;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [id, object] : graph.objects()) {
    double d = (object.centroid - point).squaredNorm();
    if (selection == ParentSelection::PointCloud) {
      for (const auto& p : object.points) d = std::min(d, (p - point).squaredNorm());
    }
    if (d < best) {
      best = d;
      best_id = id;
    }
  }
  return best_id;
}

AssociationResult register_demonstration(SceneGraph& graph, std::span<const Pose> trajectory,
                                         const JointVerdict& verdict, const RefineConfig& config) {
  config.validate();
  const Association a = associate(graph, trajectory, config.threshold);
  std::vector<Pose> poses(trajectory.begin(), trajectory.end());
  AssociationResult result;
  result.distance = a.distance;
  if (a.element_id && a.distance <= config.threshold) {
    graph.attach_articulation(*a.element_id, verdict.axis, std::move(poses));
    result.kind = AssociationKind::Matched;
    result.element_id = *a.element_id;
    result.parent_object_id = graph.parent_of(*a.element_id).value();
    return result;
  }
  const NodeId parent = nearest_object(graph, trajectory.front().position(), config.parent_selection);
  result.kind = AssociationKind::NewNode;
  result.parent_object_id = parent;
  result.element_id = graph.add_interaction_element(parent, config.interaction_label, verdict.axis, std::move(poses));
  return result;
}

}  // namespace funcgraph
