#pragma once

#include "funcgraph/geometry/pose.hpp"

#include <array>
#include <map>
#include <vector>

namespace funcgraph {

using MarkerCorners = std::array<Vec3, 4>;

// Marker detection on one frame: four ordered corner pixels.
struct MarkerDetection {
  int frame_id = 0;
  int marker_id = 0;
  std::array<Vec2, 4> corners;
};

// Calibrated marker polyhedron mounted on the handheld tool. Corners are in
// the sphere frame (meters); tip_offset is T_sphere<-tip.
class SphereModel {
 public:
  SphereModel() = default;
  // Throws InvalidConfig unless there are >= 6 markers, every marker is planar
  // within 1e-6 m and all markers share one winding relative to the sphere
  // center (corner order c0 -> c1 -> c2 turns the same way about the outward
  // normal).
  SphereModel(std::map<int, MarkerCorners> markers, Pose tip_offset);

  const std::map<int, MarkerCorners>& markers() const { return markers_; }
  const Pose& tip_offset() const { return tip_offset_; }
  const MarkerCorners* find(int marker_id) const;

  // Outward unit normal and center of a marker, sphere frame.
  Vec3 normal(int marker_id) const;
  Vec3 center(int marker_id) const;

 private:
  std::map<int, MarkerCorners> markers_;
  Pose tip_offset_;
};

// Square markers of side `marker_size` tangent to a sphere of `radius` along
// the 26 face directions of a rhombicuboctahedron (6 axes, 12 edge and 8
// corner diagonals). Marker ids 0..25.
SphereModel make_polyhedral_sphere(double radius, double marker_size, const Pose& tip_offset);

}  // namespace funcgraph
