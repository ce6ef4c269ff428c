#include "funcgraph/geometry/camera.hpp"

#include "funcgraph/error.hpp"

#include <cmath>
#include <sstream>

namespace funcgraph {

void CameraIntrinsics::validate() const {
  const bool ok = fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && cx >= 0.0 && cx < width &&
                  cy >= 0.0 && cy < height;
  if (!ok) {
    std::ostringstream msg;
    msg << "invalid intrinsics fx=" << fx << " fy=" << fy << " cx=" << cx << " cy=" << cy
        << " size=" << width << "x" << height;
    throw Error(ErrorCode::InvalidConfig, msg.str());
  }
}

std::optional<std::pair<int, int>> CameraIntrinsics::pixel_index(const Vec2& pixel) const {
  if (!std::isfinite(pixel.x()) || !std::isfinite(pixel.y())) return std::nullopt;
  const double u = std::floor(pixel.x() + 0.5);
  const double v = std::floor(pixel.y() + 0.5);
  if (u < 0.0 || v < 0.0 || u >= width || v >= height) return std::nullopt;
  return std::make_pair(static_cast<int>(u), static_cast<int>(v));
}

std::optional<Projection> try_project(const Vec3& point_world, const Pose& cam_pose,
                                      const CameraIntrinsics& k) {
  const Vec3 p = invert(cam_pose).apply(point_world);
  if (!(p.z() > 0.0)) return std::nullopt;
  return Projection{Vec2(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy), p.z()};
}

Projection project(const Vec3& point_world, const Pose& cam_pose, const CameraIntrinsics& k) {
  auto proj = try_project(point_world, cam_pose, k);
  if (!proj) throw Error(ErrorCode::BehindCamera, "point is not in front of the camera");
  return *proj;
}

Vec3 backproject(const Vec2& pixel, double depth, const Pose& cam_pose, const CameraIntrinsics& k) {
  if (!std::isfinite(depth) || depth <= 0.0) {
    throw Error(ErrorCode::InvalidDepth, "depth must be positive and finite");
  }
  const Vec3 p_cam((pixel.x() - k.cx) * depth / k.fx, (pixel.y() - k.cy) * depth / k.fy, depth);
  return cam_pose.apply(p_cam);
}

}  // namespace funcgraph
