#include "funcgraph/graph/scene_graph.hpp"

#include "funcgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace funcgraph {

std::string_view to_string(JointType type) {
  return type == JointType::Prismatic ? "prismatic" : "revolute";
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Visual: return "visual";
    case Provenance::Interaction: return "interaction";
    case Provenance::Both: return "both";
  }
  return "visual";
}

void ArticulationAxis::validate() const {
  if (!center.allFinite() || !direction.allFinite() || !std::isfinite(range)) {
    throw Error(ErrorCode::InvalidConfig, "articulation axis has non-finite values");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, "articulation direction is not unit length");
  }
  if (range < 0.0) throw Error(ErrorCode::InvalidConfig, "articulation range is negative");
}

Vec3 mean_point(const std::vector<Vec3>& points) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

SceneGraph::SceneGraph(int feature_dim) : feature_dim_(feature_dim) {
  if (feature_dim < 0) throw Error(ErrorCode::InvalidConfig, "feature_dim must be >= 0");
}

Feature SceneGraph::checked_feature(const Feature& feature) const {
  if (feature.size() != feature_dim_) {
    std::ostringstream msg;
    msg << "feature has dimension " << feature.size() << ", graph expects " << feature_dim_;
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  const double norm = feature.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::InvalidConfig, "feature must have a finite non-zero norm");
  }
  return feature / norm;
}

NodeId SceneGraph::claim_id(NodeId id) {
  next_id_ = std::max(next_id_, id + 1);
  return id;
}

NodeId SceneGraph::add_object_node(std::string label, std::vector<Vec3> points,
                                   std::optional<Feature> feature) {
  if (points.empty()) throw Error(ErrorCode::EmptyPointCloud, "object node needs points");
  ObjectNode node;
  if (feature) node.feature = checked_feature(*feature);
  node.id = claim_id(next_id_);
  node.category_label = std::move(label);
  node.centroid = mean_point(points);
  node.points = std::move(points);
  const NodeId id = node.id;
  objects_.emplace(id, std::move(node));
  return id;
}

NodeId SceneGraph::add_element_node(NodeId parent_object_id, std::string label,
                                    std::vector<Vec3> points, std::optional<Feature> feature,
                                    Provenance provenance) {
  if (!objects_.contains(parent_object_id)) {
    throw Error(ErrorCode::UnknownParent, "no object node " + std::to_string(parent_object_id));
  }
  if (provenance == Provenance::Interaction) {
    throw Error(ErrorCode::InvalidConfig,
                "interaction elements carry a trajectory; use add_interaction_element");
  }
  if (points.empty()) throw Error(ErrorCode::EmptyPointCloud, "visual element node needs points");
  ElementNode node;
  if (feature) node.feature = checked_feature(*feature);
  node.id = claim_id(next_id_);
  node.functional_label = std::move(label);
  node.centroid = mean_point(points);
  node.points = std::move(points);
  node.provenance = provenance;
  const NodeId id = node.id;
  elements_.emplace(id, std::move(node));
  parent_.emplace(id, parent_object_id);
  return id;
}

NodeId SceneGraph::add_interaction_element(NodeId parent_object_id, std::string label,
                                           const ArticulationAxis& axis,
                                           std::vector<Pose> trajectory) {
  if (!objects_.contains(parent_object_id)) {
    throw Error(ErrorCode::UnknownParent, "no object node " + std::to_string(parent_object_id));
  }
  if (trajectory.size() < 2) {
    throw Error(ErrorCode::TrajectoryTooShort, "trajectory needs at least 2 poses");
  }
  axis.validate();
  ElementNode node;
  node.id = claim_id(next_id_);
  node.functional_label = std::move(label);
  node.centroid = trajectory.front().position();
  node.articulation = axis;
  node.trajectory = std::move(trajectory);
  node.provenance = Provenance::Interaction;
  const NodeId id = node.id;
  elements_.emplace(id, std::move(node));
  parent_.emplace(id, parent_object_id);
  return id;
}

void SceneGraph::attach_articulation(NodeId element_id, const ArticulationAxis& axis,
                                     std::vector<Pose> trajectory) {
  auto it = elements_.find(element_id);
  if (it == elements_.end()) {
    throw Error(ErrorCode::UnknownElement, "no element node " + std::to_string(element_id));
  }
  if (trajectory.size() < 2) {
    throw Error(ErrorCode::TrajectoryTooShort, "trajectory needs at least 2 poses");
  }
  axis.validate();
  ElementNode& node = it->second;
  node.articulation = axis;
  node.trajectory = std::move(trajectory);
  if (node.provenance == Provenance::Visual) node.provenance = Provenance::Both;
}

void SceneGraph::set_feature(NodeId id, const Feature& feature) {
  if (auto it = objects_.find(id); it != objects_.end()) {
    it->second.feature = checked_feature(feature);
  } else if (auto et = elements_.find(id); et != elements_.end()) {
    et->second.feature = checked_feature(feature);
  } else {
    throw Error(ErrorCode::UnknownElement, "no node " + std::to_string(id));
  }
}

std::vector<QueryHit> SceneGraph::query(const Feature& query_feature, int k) const {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
  if (query_feature.size() != feature_dim_) {
    std::ostringstream msg;
    msg << "query has dimension " << query_feature.size() << ", graph expects " << feature_dim_;
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  const double qn = query_feature.norm();
  if (!(qn > 0.0)) throw Error(ErrorCode::InvalidConfig, "query feature has zero norm");
  const Feature q = query_feature / qn;

  std::vector<QueryHit> hits;
  for (const auto& [id, node] : objects_) {
    if (node.feature) hits.push_back({id, node.feature->dot(q)});
  }
  for (const auto& [id, node] : elements_) {
    if (node.feature) hits.push_back({id, node.feature->dot(q)});
  }
  const auto by_rank = [](const QueryHit& a, const QueryHit& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  };
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k), hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), by_rank);
  hits.resize(n);
  return hits;
}

std::vector<Edge> SceneGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(parent_.size());
  for (const auto& [element, object] : parent_) out.push_back({element, object});
  return out;
}

const ObjectNode* SceneGraph::find_object(NodeId id) const {
  auto it = objects_.find(id);
  return it == objects_.end() ? nullptr : &it->second;
}

const ElementNode* SceneGraph::find_element(NodeId id) const {
  auto it = elements_.find(id);
  return it == elements_.end() ? nullptr : &it->second;
}

std::optional<NodeId> SceneGraph::parent_of(NodeId element_id) const {
  auto it = parent_.find(element_id);
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

std::size_t SceneGraph::degree(NodeId object_id) const {
  return static_cast<std::size_t>(std::count_if(
      parent_.begin(), parent_.end(), [&](const auto& e) { return e.second == object_id; }));
}

void SceneGraph::check_integrity() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::ParseError, what); };
  for (const auto& [id, node] : objects_) {
    if (node.id != id) fail("object key/id mismatch at " + std::to_string(id));
    if (elements_.contains(id)) fail("id " + std::to_string(id) + " used by object and element");
    if (node.points.empty()) fail("object " + std::to_string(id) + " has no points");
    if (id >= next_id_) fail("object id beyond id counter");
  }
  for (const auto& [id, node] : elements_) {
    if (node.id != id) fail("element key/id mismatch at " + std::to_string(id));
    auto p = parent_.find(id);
    if (p == parent_.end()) fail("element " + std::to_string(id) + " has no parent edge");
    if (!objects_.contains(p->second)) {
      fail("edge from element " + std::to_string(id) + " to missing object " + std::to_string(p->second));
    }
    if (node.articulation && !node.trajectory) {
      fail("element " + std::to_string(id) + " has an axis but no trajectory");
    }
    if (node.provenance == Provenance::Interaction && !node.trajectory) {
      fail("interaction element " + std::to_string(id) + " has no trajectory");
    }
    if (node.provenance != Provenance::Interaction && node.points.empty()) {
      fail("visual element " + std::to_string(id) + " has no points");
    }
    if (id >= next_id_) fail("element id beyond id counter");
  }
  for (const auto& [element, object] : parent_) {
    if (!elements_.contains(element)) fail("edge from missing element " + std::to_string(element));
  }
}

void SceneGraphBuilder::insert(ObjectNode node) {
  const NodeId id = node.id;
  if (graph_.objects_.contains(id) || graph_.elements_.contains(id)) {
    throw std::invalid_argument("duplicate node id " + std::to_string(id));
  }
  graph_.claim_id(id);
  graph_.objects_.emplace(id, std::move(node));
}

void SceneGraphBuilder::insert(ElementNode node, NodeId parent_object_id) {
  const NodeId id = node.id;
  if (graph_.objects_.contains(id) || graph_.elements_.contains(id)) {
    throw std::invalid_argument("duplicate node id " + std::to_string(id));
  }
  if (graph_.parent_.contains(id)) {
    throw std::invalid_argument("element " + std::to_string(id) + " has more than one edge");
  }
  graph_.claim_id(id);
  graph_.parent_.emplace(id, parent_object_id);
  graph_.elements_.emplace(id, std::move(node));
}

SceneGraph SceneGraphBuilder::finish() && {
  graph_.check_integrity();
  return std::move(graph_);
}

}  // namespace funcgraph
