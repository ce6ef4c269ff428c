#pragma once

#include "funcgraph/graph/scene_graph.hpp"

#include <optional>
#include <span>
#include <vector>

namespace funcgraph {

struct PrismaticFit {
  Vec3 direction = Vec3::UnitX();  // unit, oriented along the motion (first -> last)
  Vec3 center = Vec3::Zero();      // trajectory centroid
  double residual_rmse = 0.0;      // RMS distance to the line, meters
  double travel = 0.0;             // extent along direction, meters
};

struct RevoluteFit {
  Vec3 direction = Vec3::UnitZ();  // plane normal; the arc turns counterclockwise about it
  Vec3 center = Vec3::Zero();      // circle center on the trajectory's mean plane
  double radius = 0.0;
  double residual_rmse = 0.0;  // RMS of (radial deviation, out-of-plane offset)
  double sweep = 0.0;          // radians covered by the arc, in (0, 2*pi]
};

struct ModelScores {
  double prismatic = 0.0;
  double revolute = 0.0;  // +inf when the circle fit failed
};

struct JointVerdict {
  JointType joint_type = JointType::Prismatic;
  ArticulationAxis axis;
  ModelScores scores;
  bool low_confidence = false;  // revolute with sweep under 10 degrees
  PrismaticFit prismatic;
  std::optional<RevoluteFit> revolute;
};

struct SelectionConfig {
  // Penalty weight per parameter; ln(n) when unset.
  std::optional<double> lambda;
  double epsilon = 1e-12;
  int prismatic_params = 4;
  int revolute_params = 7;
  double low_confidence_sweep = 10.0 * 3.14159265358979323846 / 180.0;
};

// Line through the centroid along the dominant right-singular vector of the
// centered points. Throws DegenerateTrajectory when all points coincide.
PrismaticFit fit_prismatic(std::span<const Vec3> positions);

// Plane normal from the weakest singular vector, then a circle in that plane:
// algebraic (Kasa) fit refined by Levenberg-Marquardt on the radial deviation.
// Throws CollinearPoints, NoConvergence.
RevoluteFit fit_revolute(std::span<const Vec3> positions);

// Fits both models and keeps the lower n*ln(rmse^2 + eps) + lambda*k. A failed
// circle fit falls back to prismatic. Throws DegenerateTrajectory for fewer
// than 3 points.
JointVerdict select_joint(std::span<const Vec3> positions, const SelectionConfig& config = {});

std::vector<Vec3> positions_of(std::span<const Pose> trajectory);

}  // namespace funcgraph
