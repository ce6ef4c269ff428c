#pragma once

// Random instance generators and brute-force reference implementations used by
// the unit and acceptance tests.

#include "funcgraph/articulation/articulation_fit.hpp"
#include "funcgraph/error.hpp"
#include "funcgraph/geometry/pose.hpp"
#include "funcgraph/graph/scene_graph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <map>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace testing_support {

using funcgraph::Feature;
using funcgraph::NodeId;
using funcgraph::Pose;
using funcgraph::Quat;
using funcgraph::Vec2;
using funcgraph::Vec3;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDeg = kPi / 180.0;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  Vec3 vec3(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Vec3 gaussian3(double sigma) { return {normal(sigma), normal(sigma), normal(sigma)}; }
  Vec3 unit3() {
    Vec3 v;
    do {
      v = gaussian3(1.0);
    } while (v.norm() < 1e-6);
    return v.normalized();
  }
  Quat rotation() {
    Eigen::Vector4d v;
    do {
      v = Eigen::Vector4d(normal(), normal(), normal(), normal());
    } while (v.norm() < 1e-6);
    v.normalize();
    return Quat(v[0], v[1], v[2], v[3]);
  }
  Pose pose(double extent = 1.0) { return Pose(vec3(-extent, extent), rotation()); }
  Feature feature(int dim) {
    Feature f(dim);
    for (int i = 0; i < dim; ++i) f[i] = normal();
    return f.normalized();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rotation_distance(const Quat& a, const Quat& b) {
  return 2.0 * std::asin(std::min(1.0, (a.coeffs() - (a.dot(b) < 0 ? -1.0 : 1.0) * b.coeffs()).norm() / 2.0));
}

// --- DBSCAN by pairwise distances and union-find over core points ----------

inline std::vector<int> dbscan_reference(const std::vector<Vec3>& pts, double eps, int min_pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> nb(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if ((pts[i] - pts[j]).norm() <= eps) nb[i].push_back(j);
    }
  }
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = static_cast<int>(nb[i].size()) >= min_pts;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (std::size_t j : nb[i]) {
      if (core[j]) parent[std::max(find(i), find(j))] = std::min(find(i), find(j));
    }
  }
  // roots are the lowest-index core of each component
  std::vector<int> label(n, -1);
  std::vector<int> label_of_root(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const std::size_t r = find(i);
    if (label_of_root[r] < 0) label_of_root[r] = next++;
    label[i] = label_of_root[r];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (std::size_t j : nb[i]) {
      if (core[j] && (label[i] < 0 || label[j] < label[i])) label[i] = label[j];
    }
  }
  return label;
}

// True when a and b induce the same partition with the same noise set.
// A few Gaussian blobs plus about 15% uniform clutter.
inline std::vector<Vec3> clustered_cloud(Gen& g, int n) {
  std::vector<Vec3> centers;
  const int k = g.integer(1, 5);
  for (int i = 0; i < k; ++i) centers.push_back(g.vec3(-0.5, 0.5));
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    if (g.coin(0.15)) {
      pts.push_back(g.vec3(-0.6, 0.6));
    } else {
      pts.push_back(centers[static_cast<std::size_t>(g.integer(0, k - 1))] + g.gaussian3(g.uniform(0.01, 0.06)));
    }
  }
  return pts;
}

inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab;
  std::map<int, int> ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

// --- Line fit by exhaustive direction search --------------------------------

struct GridLine {
  Vec3 direction;
  double rmse;
};

inline double line_rmse(const std::vector<Vec3>& pts, const Vec3& dir) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double sq = 0.0;
  for (const auto& p : pts) {
    const Vec3 x = p - c;
    sq += (x - x.dot(dir) * dir).squaredNorm();
  }
  return std::sqrt(sq / static_cast<double>(pts.size()));
}

// Directions on a latitude/longitude grid of the upper hemisphere with angular
// step `step` radians; the best one is refined by a finer local grid.
inline GridLine best_line_on_grid(const std::vector<Vec3>& pts, double step) {
  GridLine best{Vec3::UnitZ(), line_rmse(pts, Vec3::UnitZ())};
  const auto consider = [&](double theta, double phi) {
    const Vec3 d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    const double r = line_rmse(pts, d);
    if (r < best.rmse) best = {d, r};
  };
  for (double theta = 0.0; theta <= kPi / 2 + 1e-12; theta += step) {
    for (double phi = 0.0; phi < 2 * kPi; phi += step) consider(theta, phi);
  }
  return best;
}

// --- Circle fit by exhaustive center search ---------------------------------

struct GridCircle {
  Vec3 normal;
  Vec3 center;
  double radius;
  double cost;  // sum of squared radial deviations in the plane
};

// Plane from the covariance eigenvectors; centers on a coarse grid over the
// points' bounding square, then a fine grid around the coarse winner.
inline GridCircle best_circle_on_grid(const std::vector<Vec3>& pts, double coarse, double fine) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Vec3 n = es.eigenvectors().col(0);
  const Vec3 e1 = es.eigenvectors().col(2);
  const Vec3 e2 = n.cross(e1);
  std::vector<Vec2> q;
  double extent = 0.0;
  for (const auto& p : pts) {
    q.emplace_back((p - mean).dot(e1), (p - mean).dot(e2));
    extent = std::max(extent, q.back().norm());
  }
  const auto evaluate = [&](const Vec2& c, double& r) {
    r = 0.0;
    for (const auto& x : q) r += (x - c).norm();
    r /= static_cast<double>(q.size());
    double cost = 0.0;
    for (const auto& x : q) cost += std::pow((x - c).norm() - r, 2);
    return cost;
  };
  Vec2 best_c = Vec2::Zero();
  double best_r = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  const auto scan = [&](const Vec2& center, double half, double step) {
    const Vec2 start = center;
    for (double x = -half; x <= half + 1e-12; x += step) {
      for (double y = -half; y <= half + 1e-12; y += step) {
        double r = 0.0;
        const Vec2 c = start + Vec2(x, y);
        const double cost = evaluate(c, r);
        if (cost < best_cost) {
          best_cost = cost;
          best_c = c;
          best_r = r;
        }
      }
    }
  };
  scan(Vec2::Zero(), 2.0 * extent, coarse);
  scan(best_c, 2.0 * coarse, fine);
  return {n, mean + best_c.x() * e1 + best_c.y() * e2, best_r, best_cost};
}

// --- Errors ------------------------------------------------------------------

// Code of the funcgraph::Error thrown by f, or nullopt when f returns normally.
template <class F>
std::optional<funcgraph::ErrorCode> error_code_of(F&& f) {
  try {
    f();
  } catch (const funcgraph::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// --- Random scene graphs -----------------------------------------------------

inline std::vector<Vec3> point_blob(Gen& g, const Vec3& center, double spread, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.push_back(center + g.gaussian3(spread));
  return pts;
}

inline std::vector<Pose> random_trajectory(Gen& g, const Vec3& start, int n) {
  std::vector<Pose> traj;
  const Vec3 step = g.gaussian3(0.01);
  const Quat q = g.rotation();
  for (int i = 0; i < n; ++i) traj.emplace_back(start + static_cast<double>(i) * step, q);
  return traj;
}

inline funcgraph::ArticulationAxis random_axis(Gen& g) {
  funcgraph::ArticulationAxis a;
  a.joint_type = g.coin() ? funcgraph::JointType::Prismatic : funcgraph::JointType::Revolute;
  a.center = g.vec3(-2, 2);
  a.direction = g.unit3();
  a.range = g.uniform(0.0, 3.0);
  return a;
}

// Up to max_nodes nodes; roughly a third objects. Features are present with
// probability 0.8 when dim > 0. Some elements carry articulations and some are
// interaction-discovered.
inline funcgraph::SceneGraph random_graph(Gen& g, int max_nodes, int dim) {
  funcgraph::SceneGraph graph(dim);
  const int total = g.integer(0, max_nodes);
  std::vector<NodeId> objects;
  static const char* labels[] = {"cabinet", "drawer", "microwave", "door", "handle", "knob", "button", "lid"};
  const auto maybe_feature = [&]() -> std::optional<Feature> {
    if (dim > 0 && g.coin(0.8)) return g.feature(dim);
    return std::nullopt;
  };
  for (int i = 0; i < total; ++i) {
    const std::string label = labels[g.integer(0, 7)];
    if (objects.empty() || g.coin(0.35)) {
      objects.push_back(graph.add_object_node(label, point_blob(g, g.vec3(-3, 3), 0.2, g.integer(1, 30)), maybe_feature()));
      continue;
    }
    const NodeId parent = objects[static_cast<std::size_t>(g.integer(0, static_cast<int>(objects.size()) - 1))];
    const double kind = g.uniform(0, 1);
    if (kind < 0.2) {
      const NodeId id = graph.add_interaction_element(parent, "articulated-part", random_axis(g),
                                                      random_trajectory(g, g.vec3(-3, 3), g.integer(2, 8)));
      if (auto f = maybe_feature()) graph.set_feature(id, *f);
      continue;
    }
    const NodeId id = graph.add_element_node(parent, label, point_blob(g, g.vec3(-3, 3), 0.05, g.integer(1, 20)),
                                             maybe_feature());
    if (kind > 0.7) graph.attach_articulation(id, random_axis(g), random_trajectory(g, g.vec3(-3, 3), g.integer(2, 8)));
  }
  return graph;
}

// --- Joint trajectories --------------------------------------------------------

// Any unit vector perpendicular to n.
inline Vec3 perpendicular(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(helper).normalized();
}

inline std::vector<Vec3> line_points(const Vec3& start, const Vec3& dir, double length, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.push_back(start + dir * (length * i / (n - 1)));
  return pts;
}

// Counterclockwise arc about `normal` starting at angle 0 of the in-plane frame.
inline std::vector<Vec3> arc_points(const Vec3& center, const Vec3& normal, double radius, double sweep, int n) {
  const Vec3 e1 = perpendicular(normal);
  const Vec3 e2 = normal.cross(e1);
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    const double a = sweep * i / (n - 1);
    pts.push_back(center + radius * (std::cos(a) * e1 + std::sin(a) * e2));
  }
  return pts;
}

inline void add_noise(Gen& g, std::vector<Vec3>& pts, double sigma) {
  for (auto& p : pts) p += g.gaussian3(sigma);
}

// Small random instances for the oracle comparisons.
inline std::vector<Vec3> random_line_instance(Gen& g) {
  auto pts = line_points(g.vec3(-1, 1), g.unit3(), g.uniform(0.1, 0.5), g.integer(5, 30));
  add_noise(g, pts, g.uniform(0.0005, 0.005));
  return pts;
}

inline std::vector<Vec3> random_arc_instance(Gen& g) {
  auto pts = arc_points(g.vec3(-1, 1), g.unit3(), g.uniform(0.2, 0.6), g.uniform(60, 300) * kDeg, g.integer(8, 20));
  add_noise(g, pts, g.uniform(0.0002, 0.002));
  return pts;
}

// Sum of squared radial deviations of the points, projected on the plane
// through `center` with normal `normal`, from the circle (center, radius).
inline double circle_cost(const std::vector<Vec3>& pts, const Vec3& normal, const Vec3& center, double radius) {
  double cost = 0.0;
  for (const auto& p : pts) {
    Vec3 d = p - center;
    d -= d.dot(normal) * normal;
    cost += std::pow(d.norm() - radius, 2);
  }
  return cost;
}

// Distance between a point and a line (c, d).
inline double point_line_distance(const Vec3& p, const Vec3& c, const Vec3& d) {
  return (p - c).cross(d.normalized()).norm();
}

// --- Demonstrations for graph refinement ------------------------------------

// A short pull whose start lies near an existing element (when there is one
// and the coin says so) or anywhere in the scene.
inline std::vector<Pose> random_demo(Gen& g, const funcgraph::SceneGraph& graph) {
  Vec3 start = g.vec3(-3, 3);
  if (!graph.elements().empty() && g.coin(0.6)) {
    auto it = graph.elements().begin();
    std::advance(it, g.integer(0, static_cast<int>(graph.elements().size()) - 1));
    start = it->second.centroid + g.gaussian3(g.uniform(0.0, 0.1));
  }
  std::vector<Pose> traj;
  const Vec3 dir = g.unit3();
  const int n = g.integer(2, 12);
  for (int i = 0; i < n; ++i) traj.emplace_back(start + dir * (0.03 * i), Quat::Identity());
  return traj;
}

inline funcgraph::JointVerdict verdict_for(const std::vector<Pose>& traj) {
  funcgraph::JointVerdict v;
  v.axis.center = traj.front().position();
  const Vec3 d = traj.back().position() - traj.front().position();
  v.axis.direction = d.norm() > 0 ? Vec3(d.normalized()) : Vec3::UnitX();
  v.axis.range = d.norm();
  return v;
}

// --- Retrieval ranking by exhaustive cosine scoring -------------------------

inline std::vector<std::pair<NodeId, double>> cosine_ranking(const funcgraph::SceneGraph& g, const Feature& q, int k) {
  std::vector<std::pair<NodeId, double>> all;
  const Feature qn = q.normalized();
  const auto add = [&](NodeId id, const std::optional<Feature>& f) {
    if (f) all.emplace_back(id, f->normalized().dot(qn));
  };
  for (const auto& [id, o] : g.objects()) add(id, o.feature);
  for (const auto& [id, e] : g.elements()) add(id, e.feature);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
  return all;
}

}  // namespace testing_support
