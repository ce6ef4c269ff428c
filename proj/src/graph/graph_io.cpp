#include "funcgraph/graph/graph_io.hpp"

#include "funcgraph/error.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace funcgraph {

using json = nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json feature_json(const std::optional<Feature>& f) {
  if (!f) return nullptr;
  json arr = json::array();
  for (Eigen::Index i = 0; i < f->size(); ++i) arr.push_back((*f)[i]);
  return arr;
}

json points_json(const std::vector<Vec3>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back(vec_json(p));
  return arr;
}

// Walks a parsed document keeping the JSON pointer of the current value so
// every structural error names its location.
class Reader {
 public:
  Reader(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "at " + (path_.empty() ? std::string("/") : path_) + ": " + what);
  }

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  Reader at(const std::string& key) const {
    if (!value_.is_object()) fail("expected an object");
    auto it = value_.find(key);
    if (it == value_.end()) fail("missing field '" + key + "'");
    return {*it, path_ + "/" + key};
  }

  bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

  Reader at(std::size_t index) const { return {value_.at(index), path_ + "/" + std::to_string(index)}; }

  std::size_t array_size() const {
    if (!value_.is_array()) fail("expected an array");
    return value_.size();
  }

  void expect_keys(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : value_.items()) {
      if (!ok.contains(key)) fail("unknown field '" + key + "'");
    }
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double d = value_.get<double>();
    if (!std::isfinite(d)) fail("non-finite number");
    return d;
  }

  std::int64_t integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<std::int64_t>();
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  Vec3 vec3() const {
    if (array_size() != 3) fail("expected 3 numbers");
    return {at(0).number(), at(1).number(), at(2).number()};
  }

  std::vector<Vec3> points() const {
    std::vector<Vec3> out(array_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).vec3();
    return out;
  }

  Pose pose() const {
    if (array_size() != 7) fail("expected a 7-number pose [x,y,z,qx,qy,qz,qw]");
    std::array<double, 7> a{};
    for (std::size_t i = 0; i < 7; ++i) a[i] = at(i).number();
    const double qn = std::sqrt(a[3] * a[3] + a[4] * a[4] + a[5] * a[5] + a[6] * a[6]);
    if (std::abs(qn - 1.0) > 1e-6) fail("quaternion is not unit length");
    return Pose::from_array(a);
  }

  std::optional<Feature> feature(int dim) const {
    if (value_.is_null()) return std::nullopt;
    const std::size_t n = array_size();
    if (static_cast<int>(n) != dim) {
      fail("feature has dimension " + std::to_string(n) + ", header declares " + std::to_string(dim));
    }
    Feature f(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) f[static_cast<Eigen::Index>(i)] = at(i).number();
    if (std::abs(f.norm() - 1.0) > 1e-6) fail("feature is not unit norm");
    return f;
  }

 private:
  const json& value_;
  std::string path_;
};

void check_centroid(const Reader& r, const std::vector<Vec3>& points, const Vec3& centroid) {
  if (!points.empty() && (mean_point(points) - centroid).norm() > 1e-9) {
    r.fail("centroid does not match the mean of the points");
  }
}

ArticulationAxis read_axis(const Reader& r) {
  r.expect_keys({"joint_type", "center", "direction", "range"});
  ArticulationAxis axis;
  const std::string type = r.at("joint_type").string();
  if (type == "prismatic") {
    axis.joint_type = JointType::Prismatic;
  } else if (type == "revolute") {
    axis.joint_type = JointType::Revolute;
  } else {
    r.at("joint_type").fail("unknown joint type '" + type + "'");
  }
  axis.center = r.at("center").vec3();
  axis.direction = r.at("direction").vec3();
  axis.range = r.at("range").number();
  if (std::abs(axis.direction.norm() - 1.0) > 1e-9) r.at("direction").fail("direction is not unit length");
  if (axis.range < 0.0) r.at("range").fail("range is negative");
  return axis;
}

Provenance read_provenance(const Reader& r) {
  const std::string s = r.string();
  if (s == "visual") return Provenance::Visual;
  if (s == "interaction") return Provenance::Interaction;
  if (s == "both") return Provenance::Both;
  r.fail("unknown provenance '" + s + "'");
}

}  // namespace

std::string serialize(const SceneGraph& graph) {
  json doc;
  doc["header"] = {{"version", kGraphFormatVersion}, {"feature_dim", graph.feature_dim()}};

  json objects = json::array();
  for (const auto& [id, node] : graph.objects()) {
    objects.push_back({{"id", id},
                       {"label", node.category_label},
                       {"feature", feature_json(node.feature)},
                       {"centroid", vec_json(node.centroid)},
                       {"points", points_json(node.points)}});
  }
  doc["objects"] = std::move(objects);

  json elements = json::array();
  for (const auto& [id, node] : graph.elements()) {
    json e = {{"id", id},
              {"label", node.functional_label},
              {"provenance", std::string(to_string(node.provenance))},
              {"feature", feature_json(node.feature)},
              {"centroid", vec_json(node.centroid)},
              {"points", points_json(node.points)},
              {"articulation", nullptr},
              {"trajectory", nullptr}};
    if (node.articulation) {
      e["articulation"] = {{"joint_type", std::string(to_string(node.articulation->joint_type))},
                           {"center", vec_json(node.articulation->center)},
                           {"direction", vec_json(node.articulation->direction)},
                           {"range", node.articulation->range}};
    }
    if (node.trajectory) {
      json traj = json::array();
      for (const auto& p : *node.trajectory) traj.push_back(p.to_array());
      e["trajectory"] = std::move(traj);
    }
    elements.push_back(std::move(e));
  }
  doc["elements"] = std::move(elements);

  json edges = json::array();
  for (const auto& edge : graph.edges()) {
    edges.push_back({{"element", edge.element_id}, {"object", edge.object_id}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump() + "\n";
}

namespace {

SceneGraph read_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  const Reader root(doc, "");
  root.expect_keys({"header", "objects", "elements", "edges"});

  const Reader header = root.at("header");
  header.expect_keys({"version", "feature_dim"});
  if (header.at("version").integer() != kGraphFormatVersion) {
    header.at("version").fail("unsupported version");
  }
  const std::int64_t dim = header.at("feature_dim").integer();
  if (dim < 0 || dim > (1 << 20)) header.at("feature_dim").fail("feature_dim out of range");
  SceneGraphBuilder builder(static_cast<int>(dim));

  const Reader objects = root.at("objects");
  for (std::size_t i = 0; i < objects.array_size(); ++i) {
    const Reader o = objects.at(i);
    o.expect_keys({"id", "label", "feature", "centroid", "points"});
    ObjectNode node;
    node.id = o.at("id").integer();
    if (node.id < 0) o.at("id").fail("negative id");
    node.category_label = o.at("label").string();
    node.feature = o.at("feature").feature(static_cast<int>(dim));
    node.centroid = o.at("centroid").vec3();
    node.points = o.at("points").points();
    if (node.points.empty()) o.at("points").fail("object node has no points");
    check_centroid(o, node.points, node.centroid);
    try {
      builder.insert(std::move(node));
    } catch (const std::invalid_argument& e) {
      o.fail(e.what());
    }
  }

  std::map<NodeId, NodeId> parent;
  const Reader edges = root.at("edges");
  for (std::size_t i = 0; i < edges.array_size(); ++i) {
    const Reader e = edges.at(i);
    e.expect_keys({"element", "object"});
    const NodeId element = e.at("element").integer();
    const NodeId object = e.at("object").integer();
    if (!parent.emplace(element, object).second) {
      e.fail("element " + std::to_string(element) + " has more than one parent edge");
    }
  }

  const Reader elements = root.at("elements");
  std::set<NodeId> seen_elements;
  for (std::size_t i = 0; i < elements.array_size(); ++i) {
    const Reader r = elements.at(i);
    r.expect_keys({"id", "label", "provenance", "feature", "centroid", "points", "articulation",
                   "trajectory"});
    ElementNode node;
    node.id = r.at("id").integer();
    if (node.id < 0) r.at("id").fail("negative id");
    node.functional_label = r.at("label").string();
    node.provenance = read_provenance(r.at("provenance"));
    node.feature = r.at("feature").feature(static_cast<int>(dim));
    node.centroid = r.at("centroid").vec3();
    node.points = r.at("points").points();
    check_centroid(r, node.points, node.centroid);
    if (!r.at("articulation").value().is_null()) node.articulation = read_axis(r.at("articulation"));
    if (!r.at("trajectory").value().is_null()) {
      const Reader t = r.at("trajectory");
      std::vector<Pose> traj(t.array_size());
      for (std::size_t k = 0; k < traj.size(); ++k) traj[k] = t.at(k).pose();
      if (traj.size() < 2) t.fail("trajectory needs at least 2 poses");
      node.trajectory = std::move(traj);
    }
    auto p = parent.find(node.id);
    if (p == parent.end()) r.fail("element has no parent edge");
    const NodeId parent_id = p->second;
    if (!builder.has_object(parent_id)) {
      r.fail("parent object " + std::to_string(parent_id) + " does not exist");
    }
    seen_elements.insert(node.id);
    try {
      builder.insert(std::move(node), parent_id);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  for (const auto& [element, object] : parent) {
    if (!seen_elements.contains(element)) {
      edges.fail("edge references missing element " + std::to_string(element));
    }
  }
  return std::move(builder).finish();
}

}  // namespace

SceneGraph deserialize(std::string_view text) {
  try {
    return read_graph(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace funcgraph
