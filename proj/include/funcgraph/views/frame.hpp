#pragma once

#include "funcgraph/geometry/camera.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace funcgraph {

// Row-major depth raster in meters. Zero, negative or non-finite entries mark
// invalid pixels.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  DepthImage() = default;
  DepthImage(int w, int h, float fill = 0.0f)
      : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  float at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
  float& at(int u, int v) { return values[static_cast<std::size_t>(v) * width + u]; }

  static bool is_valid(float d) { return std::isfinite(d) && d > 0.0f; }
};

// One posed observation. cam_pose is T_world<-cam.
struct FrameRecord {
  int frame_id = 0;
  double timestamp = 0.0;
  CameraIntrinsics intrinsics;
  Pose cam_pose;
  std::optional<DepthImage> depth;

  // Throws InvalidConfig for bad intrinsics, DimensionMismatch when the depth
  // raster size differs from the intrinsics.
  void validate() const;
};

}  // namespace funcgraph
