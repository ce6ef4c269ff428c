#include "funcgraph/bench/scenario.hpp"

#include "funcgraph/error.hpp"
#include "funcgraph/geometry/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace funcgraph {

namespace {

// Independent stream per (seed, frame, purpose) so that adding frames or
// changing the camera never shifts another draw.
std::mt19937_64 frame_rng(std::uint64_t seed, std::size_t frame, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(frame), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kMarkerStream = 1;
constexpr std::uint64_t kCameraStream = 2;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-9) x = z.cross(Vec3::UnitY());
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return {eye, r};
}

void ScenarioConfig::validate() const {
  const auto bad = [&](const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, "scenario '" + name + "': " + what);
  };
  axis.validate();
  if (!start.allFinite()) bad("start position must be finite");
  if (!(duration > 0.0) || !std::isfinite(duration)) bad("duration must be positive");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) bad("frame_rate must be positive");
  if (!finite_nonneg(pixel_noise_sigma)) bad("pixel_noise_sigma must be >= 0");
  if (!finite_nonneg(dropout_rate) || dropout_rate > 1.0) bad("dropout_rate must be in [0, 1]");
  if (!(sphere.radius > 0.0) || !(sphere.marker_size > 0.0)) bad("sphere dimensions must be positive");
  if (!finite_nonneg(camera.jitter_position) || !finite_nonneg(camera.jitter_rotation)) {
    bad("camera jitter must be >= 0");
  }
  intrinsics.validate();
  switch (camera.kind) {
    case CameraPathKind::Static:
      if (camera.poses.size() != 1) bad("static camera needs exactly one pose");
      break;
    case CameraPathKind::Explicit:
      if (camera.poses.size() != frame_count()) {
        bad("explicit camera path needs one pose per frame (" + std::to_string(frame_count()) + ")");
      }
      break;
    case CameraPathKind::Orbit:
      if (!(camera.radius > 0.0) || !camera.target.allFinite()) bad("orbit radius must be positive");
      break;
  }
  if (axis.joint_type == JointType::Revolute) {
    const Vec3 offset = start - axis.center;
    if ((offset - offset.dot(axis.direction) * axis.direction).norm() < 1e-6) {
      bad("revolute start lies on the axis");
    }
  }
}

std::size_t ScenarioConfig::frame_count() const {
  return static_cast<std::size_t>(std::llround(duration * frame_rate)) + 1;
}

double motion_progress(MotionProfile profile, double s) {
  s = std::clamp(s, 0.0, 1.0);
  if (profile == MotionProfile::Constant) return s;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * s));
}

Pose ground_truth_tip(const ScenarioConfig& config, double t) {
  const double amount = config.axis.range * motion_progress(config.profile, t / config.duration);
  const Pose start(config.start, config.start_orientation);
  if (config.axis.joint_type == JointType::Prismatic) {
    return compose(Pose(amount * config.axis.direction, Quat::Identity()), start);
  }
  // rotate about the line through axis.center
  const Pose about = compose(Pose(config.axis.center, Quat::Identity()),
                             compose(Pose::rotation(config.axis.direction, amount),
                                     Pose(-config.axis.center, Quat::Identity())));
  return compose(about, start);
}

Pose camera_pose_at(const ScenarioConfig& config, std::size_t frame_index) {
  const CameraPath& path = config.camera;
  switch (path.kind) {
    case CameraPathKind::Static:
      return path.poses.front();
    case CameraPathKind::Explicit:
      return path.poses.at(frame_index);
    case CameraPathKind::Orbit:
      break;
  }
  const double t = static_cast<double>(frame_index) / config.frame_rate;
  const double angle = path.start_angle + path.angular_rate * t;
  const Vec3 eye = path.target + Vec3(path.radius * std::cos(angle), path.radius * std::sin(angle), path.height);
  Vec3 aim = path.target;
  if (path.follow) aim = compose(ground_truth_tip(config, t), invert(config.sphere.tip_offset)).position();
  Pose pose = look_at(eye, aim);
  if (path.jitter_position > 0.0 || path.jitter_rotation > 0.0) {
    auto rng = frame_rng(config.seed, frame_index, kCameraStream);
    std::normal_distribution<double> n01(0.0, 1.0);
    Vec3 dp;
    Vec3 dr;
    for (int i = 0; i < 3; ++i) dp[i] = path.jitter_position * n01(rng);
    for (int i = 0; i < 3; ++i) dr[i] = path.jitter_rotation * n01(rng);
    pose = Pose(pose.position() + dp, exp_map(dr) * pose.orientation());
  }
  return pose;
}

SphereModel make_sphere(const SphereParams& spec) {
  return make_polyhedral_sphere(spec.radius, spec.marker_size, spec.tip_offset);
}

SyntheticDemo generate(const ScenarioConfig& config, const SphereModel& sphere) {
  config.validate();
  SyntheticDemo demo;
  demo.axis = config.axis;
  const std::size_t n = config.frame_count();
  const Pose tip_from_sphere = invert(sphere.tip_offset());
  const double w = config.intrinsics.width;
  const double h = config.intrinsics.height;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / config.frame_rate;
    const Pose tip = ground_truth_tip(config, t);
    demo.ground_truth.push_back({t, tip});

    FrameRecord frame;
    frame.frame_id = static_cast<int>(i);
    frame.timestamp = t;
    frame.intrinsics = config.intrinsics;
    frame.cam_pose = camera_pose_at(config, i);
    demo.frames.push_back(frame);

    const Pose world_from_sphere = compose(tip, tip_from_sphere);
    const Vec3 eye = frame.cam_pose.position();
    auto rng = frame_rng(config.seed, i, kMarkerStream);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (const auto& [marker_id, corners] : sphere.markers()) {
      // fixed draw order: dropout, then 8 pixel offsets
      const bool dropped = u01(rng) < config.dropout_rate;
      std::array<Vec2, 4> noise;
      for (auto& e : noise) {
        e.x() = config.pixel_noise_sigma * n01(rng);
        e.y() = config.pixel_noise_sigma * n01(rng);
      }
      if (dropped) continue;

      const Vec3 center = world_from_sphere.apply(sphere.center(marker_id));
      const Vec3 normal = world_from_sphere.orientation() * sphere.normal(marker_id);
      if (normal.dot(eye - center) <= 0.0) continue;

      MarkerDetection det;
      det.frame_id = frame.frame_id;
      det.marker_id = marker_id;
      bool inside = true;
      for (std::size_t c = 0; c < 4 && inside; ++c) {
        const auto proj = try_project(world_from_sphere.apply(corners[c]), frame.cam_pose, config.intrinsics);
        if (!proj) {
          inside = false;
          break;
        }
        const Vec2& px = proj->pixel;
        inside = px.x() >= -0.5 && px.y() >= -0.5 && px.x() < w - 0.5 && px.y() < h - 0.5;
        det.corners[c] = px + noise[c];
      }
      if (inside) demo.detections.push_back(det);
    }
  }
  return demo;
}

}  // namespace funcgraph
