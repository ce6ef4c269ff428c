#pragma once

#include "funcgraph/geometry/pose.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace funcgraph {

using NodeId = std::int64_t;
using Feature = Eigen::VectorXd;

enum class JointType { Prismatic, Revolute };
enum class Provenance { Visual, Interaction, Both };

std::string_view to_string(JointType type);
std::string_view to_string(Provenance provenance);

// Kinematic axis of an articulated element. `range` is meters of travel for
// prismatic joints and radians of sweep for revolute joints.
struct ArticulationAxis {
  JointType joint_type = JointType::Prismatic;
  Vec3 center = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  double range = 0.0;

  // Throws InvalidConfig unless |direction| = 1 +- 1e-9 and range >= 0.
  void validate() const;
};

struct ObjectNode {
  NodeId id = 0;
  std::string category_label;
  std::optional<Feature> feature;
  std::vector<Vec3> points;
  Vec3 centroid = Vec3::Zero();
};

struct ElementNode {
  NodeId id = 0;
  std::string functional_label;
  std::optional<Feature> feature;
  std::vector<Vec3> points;  // empty for interaction-discovered nodes
  Vec3 centroid = Vec3::Zero();
  std::optional<ArticulationAxis> articulation;
  std::optional<std::vector<Pose>> trajectory;
  Provenance provenance = Provenance::Visual;
};

struct Edge {
  NodeId element_id = 0;
  NodeId object_id = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct QueryHit {
  NodeId id = 0;
  double score = 0.0;
};

Vec3 mean_point(const std::vector<Vec3>& points);

// Functional scene graph: object nodes, element nodes and element->object
// edges. Object and element ids share one counter and are never reused.
//
// Not internally synchronized: one writer at a time, concurrent readers only
// while no write is in progress.
class SceneGraph {
 public:
  // feature_dim 0 means the graph stores no features.
  explicit SceneGraph(int feature_dim = 0);

  int feature_dim() const { return feature_dim_; }
  NodeId next_id() const { return next_id_; }

  // Throws EmptyPointCloud on empty points, DimensionMismatch on a feature of
  // the wrong size. Features are normalized on insertion.
  NodeId add_object_node(std::string label, std::vector<Vec3> points,
                         std::optional<Feature> feature = std::nullopt);

  // Adds the element and its edge to `parent_object_id`. Throws UnknownParent,
  // EmptyPointCloud, DimensionMismatch. Provenance::Interaction is rejected
  // here (InvalidConfig); use add_interaction_element.
  NodeId add_element_node(NodeId parent_object_id, std::string label, std::vector<Vec3> points,
                          std::optional<Feature> feature = std::nullopt,
                          Provenance provenance = Provenance::Visual);

  // Element discovered only through a demonstration: no geometry, centroid at
  // the trajectory start, articulation attached in the same step.
  NodeId add_interaction_element(NodeId parent_object_id, std::string label,
                                 const ArticulationAxis& axis, std::vector<Pose> trajectory);

  // Throws UnknownElement, TrajectoryTooShort (< 2 poses), InvalidConfig for a
  // malformed axis. Visual provenance becomes Both.
  void attach_articulation(NodeId element_id, const ArticulationAxis& axis,
                           std::vector<Pose> trajectory);

  // Sets (normalizes) the feature of an object or element node. Throws
  // UnknownElement for a missing id, DimensionMismatch.
  void set_feature(NodeId id, const Feature& feature);

  // Cosine ranking over every node with a feature, descending score, ties by
  // ascending id. Throws DimensionMismatch, InvalidConfig for k < 1.
  std::vector<QueryHit> query(const Feature& query_feature, int k) const;

  const std::map<NodeId, ObjectNode>& objects() const { return objects_; }
  const std::map<NodeId, ElementNode>& elements() const { return elements_; }
  std::vector<Edge> edges() const;  // sorted by element id

  const ObjectNode* find_object(NodeId id) const;
  const ElementNode* find_element(NodeId id) const;
  std::optional<NodeId> parent_of(NodeId element_id) const;
  std::size_t degree(NodeId object_id) const;
  std::size_t node_count() const { return objects_.size() + elements_.size(); }

  // Throws ParseError naming the violated invariant. Used after loading.
  void check_integrity() const;

 private:
  friend class SceneGraphBuilder;

  Feature checked_feature(const Feature& feature) const;
  NodeId claim_id(NodeId id);

  int feature_dim_ = 0;
  NodeId next_id_ = 0;
  std::map<NodeId, ObjectNode> objects_;
  std::map<NodeId, ElementNode> elements_;
  std::map<NodeId, NodeId> parent_;
};

// Reassembles a graph from already-validated parts (deserialization). Values are
// stored verbatim: no renormalization, no centroid recomputation.
class SceneGraphBuilder {
 public:
  explicit SceneGraphBuilder(int feature_dim) : graph_(feature_dim) {}
  // insert() throws std::invalid_argument on duplicate ids or double parents.
  void insert(ObjectNode node);
  void insert(ElementNode node, NodeId parent_object_id);
  bool has_object(NodeId id) const { return graph_.objects_.contains(id); }
  // Runs check_integrity().
  SceneGraph finish() &&;

 private:
  SceneGraph graph_;
};

}  // namespace funcgraph
