#pragma once

#include "funcgraph/geometry/pose.hpp"

#include <optional>

namespace funcgraph {

// Pinhole intrinsics of a rectified camera. Pixel centers sit at integer
// coordinates: pixel (i, j) covers [i - 0.5, i + 0.5) x [j - 0.5, j + 0.5).
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws InvalidConfig unless fx, fy > 0, 0 <= cx < width, 0 <= cy < height.
  void validate() const;

  // Nearest pixel index for a continuous pixel coordinate, if inside the image.
  std::optional<std::pair<int, int>> pixel_index(const Vec2& pixel) const;
};

struct Projection {
  Vec2 pixel;
  double depth = 0.0;  // meters along the optical axis
};

// cam_pose is T_world<-cam. Throws BehindCamera when the camera-frame z <= 0.
Projection project(const Vec3& point_world, const Pose& cam_pose, const CameraIntrinsics& k);

// Same as project() but returns nullopt instead of throwing.
std::optional<Projection> try_project(const Vec3& point_world, const Pose& cam_pose,
                                      const CameraIntrinsics& k);

// Throws InvalidDepth when depth <= 0 or non-finite.
Vec3 backproject(const Vec2& pixel, double depth, const Pose& cam_pose, const CameraIntrinsics& k);

}  // namespace funcgraph
