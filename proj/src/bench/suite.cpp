#include "funcgraph/bench/suite.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace funcgraph {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

ScenarioConfig suite_scenario(std::size_t index, JointType type, double amount, double radius,
                              ViewSetting view, const NoiseSettings& noise) {
  ScenarioConfig c;
  const double heading = 0.7 * static_cast<double>(index);
  c.name = std::string(to_string(type)) + "-" + std::to_string(index) +
           (view == ViewSetting::Static ? "-static" : "-dynamic");
  c.axis.joint_type = type;
  c.axis.range = amount;
  if (type == JointType::Prismatic) {
    c.axis.direction = Vec3(std::cos(heading), std::sin(heading), 0.0);
    c.start = Vec3(0.0, 0.0, 0.8);
  } else {
    c.axis.direction = index % 2 == 0 ? Vec3::UnitZ() : Vec3(std::cos(heading), std::sin(heading), 0.0);
    c.axis.center = Vec3(0.0, 0.0, 0.8);
    const Vec3 helper = index % 2 == 0 ? Vec3(std::cos(heading), std::sin(heading), 0.0) : Vec3::UnitZ();
    c.start = c.axis.center + radius * helper;
  }
  c.duration = 3.0;
  c.profile = MotionProfile::Ease;
  c.intrinsics = {1000.0, 1000.0, 639.5, 479.5, 1280, 960};
  c.pixel_noise_sigma = noise.pixel_noise_sigma;
  c.dropout_rate = noise.dropout_rate;
  c.frame_rate = noise.frame_rate;
  c.seed = noise.seed;

  // Frame the whole motion: aim at its middle from a distance that leaves
  // margin around its extent.
  Vec3 lo = Vec3::Constant(1e9);
  Vec3 hi = Vec3::Constant(-1e9);
  const Pose sphere_from_tip_inv = invert(c.sphere.tip_offset);
  for (int i = 0; i <= 20; ++i) {
    const Vec3 p = compose(ground_truth_tip(c, c.duration * i / 20.0), sphere_from_tip_inv).position();
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 mid = 0.5 * (lo + hi);
  const double extent = (hi - lo).norm();
  const double distance = 0.5 + extent;
  const double elevation = 25.0 * kDeg;
  const double azimuth = heading + 120.0 * kDeg;

  c.camera.target = mid;
  c.camera.radius = distance * std::cos(elevation);
  c.camera.height = distance * std::sin(elevation);
  if (view == ViewSetting::Static) {
    c.camera.kind = CameraPathKind::Static;
    const Vec3 eye = mid + Vec3(c.camera.radius * std::cos(azimuth), c.camera.radius * std::sin(azimuth),
                                c.camera.height);
    c.camera.poses = {look_at(eye, mid)};
  } else {
    c.camera.kind = CameraPathKind::Orbit;
    c.camera.start_angle = azimuth - 30.0 * kDeg;
    c.camera.angular_rate = 60.0 * kDeg / c.duration;
    c.camera.follow = true;
    c.camera.jitter_position = 0.002;
    c.camera.jitter_rotation = 0.002;
  }
  return c;
}

std::vector<ScenarioConfig> standard_suite(ViewSetting view, const NoiseSettings& noise) {
  std::vector<ScenarioConfig> out;
  for (std::size_t i = 0; i < 10; ++i) {
    out.push_back(suite_scenario(i, JointType::Prismatic, 0.1 + 0.4 * static_cast<double>(i) / 9.0, 0.0, view, noise));
  }
  for (std::size_t i = 0; i < 10; ++i) {
    const double sweep = (20.0 + 150.0 * static_cast<double>(i) / 9.0) * kDeg;
    const double radius = 0.2 + 0.6 * static_cast<double>((i * 7) % 10) / 9.0;
    out.push_back(suite_scenario(10 + i, JointType::Revolute, sweep, radius, view, noise));
  }
  return out;
}

}  // namespace funcgraph
