#include "funcgraph/tracking/sphere_model.hpp"

#include "funcgraph/error.hpp"

#include <cmath>

namespace funcgraph {

namespace {

Vec3 raw_normal(const MarkerCorners& c) { return (c[1] - c[0]).cross(c[3] - c[0]); }

Vec3 corner_mean(const MarkerCorners& c) { return (c[0] + c[1] + c[2] + c[3]) / 4.0; }

}  // namespace

SphereModel::SphereModel(std::map<int, MarkerCorners> markers, Pose tip_offset)
    : markers_(std::move(markers)), tip_offset_(tip_offset) {
  if (markers_.size() < 6) {
    throw Error(ErrorCode::InvalidConfig, "sphere model needs at least 6 markers, got " +
                                              std::to_string(markers_.size()));
  }
  int winding = 0;
  for (const auto& [id, c] : markers_) {
    const Vec3 n = raw_normal(c);
    if (!(n.norm() > 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "marker " + std::to_string(id) + " is degenerate");
    }
    const Vec3 unit = n.normalized();
    for (const auto& corner : c) {
      if (std::abs((corner - c[0]).dot(unit)) > 1e-6) {
        throw Error(ErrorCode::InvalidConfig, "marker " + std::to_string(id) + " corners are not coplanar");
      }
    }
    const int w = unit.dot(corner_mean(c)) >= 0.0 ? 1 : -1;
    if (winding == 0) winding = w;
    if (w != winding) {
      throw Error(ErrorCode::InvalidConfig, "marker " + std::to_string(id) + " has inconsistent corner winding");
    }
  }
}

const MarkerCorners* SphereModel::find(int marker_id) const {
  auto it = markers_.find(marker_id);
  return it == markers_.end() ? nullptr : &it->second;
}

Vec3 SphereModel::center(int marker_id) const { return corner_mean(markers_.at(marker_id)); }

Vec3 SphereModel::normal(int marker_id) const {
  const MarkerCorners& c = markers_.at(marker_id);
  Vec3 n = raw_normal(c).normalized();
  if (n.dot(corner_mean(c)) < 0.0) n = -n;
  return n;
}

SphereModel make_polyhedral_sphere(double radius, double marker_size, const Pose& tip_offset) {
  std::vector<Vec3> dirs;
  for (int x = -1; x <= 1; ++x) {
    for (int y = -1; y <= 1; ++y) {
      for (int z = -1; z <= 1; ++z) {
        if (x != 0 || y != 0 || z != 0) dirs.emplace_back(x, y, z);
      }
    }
  }
  std::map<int, MarkerCorners> markers;
  const double h = 0.5 * marker_size;
  int id = 0;
  for (const Vec3& d : dirs) {
    const Vec3 n = d.normalized();
    const Vec3 helper = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 a = helper.cross(n).normalized();  // marker "right"
    const Vec3 b = n.cross(a);                    // marker "up"
    const Vec3 c = radius * n;
    // top-left, top-right, bottom-right, bottom-left seen from outside
    markers[id++] = {c + h * (-a + b), c + h * (a + b), c + h * (a - b), c + h * (-a - b)};
  }
  return SphereModel(std::move(markers), tip_offset);
}

}  // namespace funcgraph
