#pragma once

#include "funcgraph/graph/scene_graph.hpp"
#include "funcgraph/tracking/sphere_model.hpp"
#include "funcgraph/views/frame.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace funcgraph {

enum class MotionProfile { Ease, Constant };
enum class CameraPathKind { Static, Orbit, Explicit };

// Camera trajectory observing the demonstration. Static uses `poses[0]` for
// every frame; Explicit needs one pose per frame; Orbit circles `target` at
// `radius` and `height`, looking at the target (or at the moving sphere when
// `follow` is set), with optional per-frame Gaussian jitter.
struct CameraPath {
  CameraPathKind kind = CameraPathKind::Static;
  std::vector<Pose> poses;  // T_world<-cam
  Vec3 target = Vec3::Zero();
  double radius = 0.8;
  double height = 0.3;
  double start_angle = 0.0;   // rad, about world +z
  double angular_rate = 0.5;  // rad/s
  double jitter_position = 0.0;  // m
  double jitter_rotation = 0.0;  // rad
  bool follow = false;
};

// Camera at `eye` looking at `target` with world +z up (x right, y down,
// z forward in the camera frame).
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

struct SphereParams {
  double radius = 0.05;
  double marker_size = 0.03;
  Pose tip_offset = Pose::translation(0.0, 0.0, -0.15);  // T_sphere<-tip
};

struct ScenarioConfig {
  std::string name = "scenario";
  // Ground-truth joint. The tip starts at `start` with orientation
  // `start_orientation`; a revolute joint turns it about the line
  // (axis.center, axis.direction) by axis.range radians, a prismatic joint
  // slides it by axis.range meters along axis.direction.
  ArticulationAxis axis;
  Vec3 start = Vec3::Zero();
  Quat start_orientation = Quat::Identity();
  double duration = 3.0;  // s
  MotionProfile profile = MotionProfile::Ease;
  CameraPath camera;
  CameraIntrinsics intrinsics{600.0, 600.0, 319.5, 239.5, 640, 480};
  SphereParams sphere;
  double pixel_noise_sigma = 0.0;
  double dropout_rate = 0.0;
  double frame_rate = 30.0;
  std::uint64_t seed = 0;

  // Throws InvalidConfig.
  void validate() const;
  std::size_t frame_count() const;
};

struct SyntheticDemo {
  std::vector<TimedPose> ground_truth;  // T_world<-tip per frame
  ArticulationAxis axis;
  std::vector<FrameRecord> frames;
  std::vector<MarkerDetection> detections;
};

// Fraction of the motion completed at normalized time s in [0, 1].
double motion_progress(MotionProfile profile, double s);

// Tip pose at time t under the analytic joint motion.
Pose ground_truth_tip(const ScenarioConfig& config, double t);

Pose camera_pose_at(const ScenarioConfig& config, std::size_t frame_index);

SphereModel make_sphere(const SphereParams& spec);

// Deterministic given the config (including seed). Noise and dropout are drawn
// for every marker of every frame, visible or not, so two scenarios that differ
// only in camera path share one noise realization. Throws InvalidConfig.
SyntheticDemo generate(const ScenarioConfig& config, const SphereModel& sphere);

}  // namespace funcgraph
