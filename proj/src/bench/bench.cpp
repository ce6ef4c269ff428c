#include "funcgraph/bench/bench.hpp"

#include "funcgraph/bench/metrics.hpp"
#include "funcgraph/error.hpp"

#include "common/json_fields.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace funcgraph {

TrackConfig matched_track_config(const ScenarioConfig& config, const FilterConfig& base) {
  TrackConfig tc;
  tc.filter = base;
  tc.filter.sigma_position = std::max(0.004 * config.pixel_noise_sigma, 1e-9);
  tc.filter.sigma_rotation = std::max(0.01 * config.pixel_noise_sigma, 1e-9);
  return tc;
}

ScenarioOutcome run_scenario(const ScenarioConfig& config, const BenchOptions& options) {
  const SphereModel sphere = make_sphere(config.sphere);
  const SyntheticDemo demo = generate(config, sphere);
  const TrackConfig tc = options.track.value_or(matched_track_config(config));
  const TrackResult tracked = track(demo.detections, demo.frames, sphere, tc);

  std::vector<Pose> poses;
  for (const auto& tp : tracked.trajectory) poses.push_back(tp.pose);
  const std::vector<Vec3> positions = positions_of(poses);

  ScenarioOutcome out;
  out.name = config.name;
  out.seed = config.seed;
  out.gt_type = config.axis.joint_type;
  out.verdict = select_joint(positions, options.selection);
  out.type_correct = out.verdict.joint_type == out.gt_type;
  out.frames_total = demo.frames.size();
  out.frames_solved = tracked.raw.size();

  const AlignedRmse aligned =
      trajectory_rmse_aligned(tracked.trajectory, demo.ground_truth, 0.5 / config.frame_rate);
  out.t_err = aligned.rmse;
  out.unaligned = aligned.unmatched;
  out.theta_err = axis_angular_error(out.verdict.axis.direction, config.axis.direction);
  if (out.gt_type == JointType::Revolute && out.verdict.joint_type == JointType::Revolute) {
    out.d_err = axis_position_error(out.verdict.axis, config.axis);
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

BenchSummary summarize(const std::vector<ScenarioOutcome>& outcomes, std::size_t failures) {
  BenchSummary s;
  s.runs = outcomes.size();
  s.failures = failures;
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<double> d;
  std::size_t correct = 0;
  for (const auto& o : outcomes) {
    t.push_back(o.t_err);
    theta.push_back(o.theta_err);
    if (o.d_err) d.push_back(*o.d_err);
    if (o.type_correct) ++correct;
  }
  s.median_t_err = median(t);
  s.median_theta_err = median(theta);
  if (!d.empty()) s.median_d_err = median(d);
  const std::size_t attempted = outcomes.size() + failures;
  s.type_accuracy = attempted == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(attempted);
  return s;
}

namespace {

using detail::Fields;
using detail::json;

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text, const std::string& where) {
  const json root = detail::parse_json(json_text, where);
  ScenarioConfig c;
  Fields f(root, where);
  c.name = f.text("name", c.name);
  const std::string type = f.text("joint_type");
  if (type == "prismatic") {
    c.axis.joint_type = JointType::Prismatic;
  } else if (type == "revolute") {
    c.axis.joint_type = JointType::Revolute;
  } else {
    f.fail_at("joint_type", "expected \"prismatic\" or \"revolute\"");
  }
  c.axis.center = f.vec3("axis_center", c.axis.center);
  c.axis.direction = f.vec3("axis_direction", c.axis.direction);
  if (!(c.axis.direction.norm() > 0.0)) f.fail_at("axis_direction", "zero direction");
  c.axis.direction.normalize();
  c.axis.range = f.number(c.axis.joint_type == JointType::Prismatic ? "travel" : "sweep", 0.0);
  c.start = f.vec3("start", c.start);
  c.start_orientation = f.quaternion("start_orientation", c.start_orientation);
  c.duration = f.number("duration", c.duration);
  const std::string profile = f.text("profile", "ease");
  if (profile == "ease") {
    c.profile = MotionProfile::Ease;
  } else if (profile == "constant") {
    c.profile = MotionProfile::Constant;
  } else {
    f.fail_at("profile", "expected \"ease\" or \"constant\"");
  }
  c.pixel_noise_sigma = f.number("pixel_noise_sigma", c.pixel_noise_sigma);
  c.dropout_rate = f.number("dropout_rate", c.dropout_rate);
  c.frame_rate = f.number("frame_rate", c.frame_rate);
  const long long seed = f.integer("seed", 0);
  if (seed < 0) f.fail_at("seed", "expected a non-negative integer");
  c.seed = static_cast<std::uint64_t>(seed);

  if (f.get("intrinsics") != nullptr) {
    Fields k = f.object("intrinsics");
    c.intrinsics.fx = k.number("fx", c.intrinsics.fx);
    c.intrinsics.fy = k.number("fy", c.intrinsics.fy);
    c.intrinsics.cx = k.number("cx", c.intrinsics.cx);
    c.intrinsics.cy = k.number("cy", c.intrinsics.cy);
    c.intrinsics.width = static_cast<int>(k.integer("width", c.intrinsics.width));
    c.intrinsics.height = static_cast<int>(k.integer("height", c.intrinsics.height));
    k.finish();
  }
  if (f.get("sphere") != nullptr) {
    Fields s = f.object("sphere");
    c.sphere.radius = s.number("radius", c.sphere.radius);
    c.sphere.marker_size = s.number("marker_size", c.sphere.marker_size);
    if (const json* t = s.get("tip_offset")) c.sphere.tip_offset = s.pose_of(*t, "tip_offset");
    s.finish();
  }
  {
    Fields cam = f.object("camera");
    const std::string kind = cam.text("kind");
    if (kind == "static") {
      c.camera.kind = CameraPathKind::Static;
    } else if (kind == "orbit") {
      c.camera.kind = CameraPathKind::Orbit;
    } else if (kind == "explicit") {
      c.camera.kind = CameraPathKind::Explicit;
    } else {
      cam.fail_at("kind", "expected \"static\", \"orbit\" or \"explicit\"");
    }
    if (const json* poses = cam.get("poses")) {
      if (!poses->is_array()) cam.fail_at("poses", "expected an array of poses");
      for (std::size_t i = 0; i < poses->size(); ++i) {
        c.camera.poses.push_back(cam.pose_of((*poses)[i], "poses/" + std::to_string(i)));
      }
    }
    c.camera.target = cam.vec3("target", c.camera.target);
    c.camera.radius = cam.number("radius", c.camera.radius);
    c.camera.height = cam.number("height", c.camera.height);
    c.camera.start_angle = cam.number("start_angle", c.camera.start_angle);
    c.camera.angular_rate = cam.number("angular_rate", c.camera.angular_rate);
    c.camera.jitter_position = cam.number("jitter_position", c.camera.jitter_position);
    c.camera.jitter_rotation = cam.number("jitter_rotation", c.camera.jitter_rotation);
    c.camera.follow = cam.boolean("follow", c.camera.follow);
    cam.finish();
  }
  f.finish();
  c.validate();
  return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  const bool prismatic = c.axis.joint_type == JointType::Prismatic;
  j["joint_type"] = std::string(to_string(c.axis.joint_type));
  j["axis_center"] = {c.axis.center.x(), c.axis.center.y(), c.axis.center.z()};
  j["axis_direction"] = {c.axis.direction.x(), c.axis.direction.y(), c.axis.direction.z()};
  j[prismatic ? "travel" : "sweep"] = c.axis.range;
  j["start"] = {c.start.x(), c.start.y(), c.start.z()};
  const Quat q = canonical(c.start_orientation);
  j["start_orientation"] = {q.x(), q.y(), q.z(), q.w()};
  j["duration"] = c.duration;
  j["profile"] = c.profile == MotionProfile::Ease ? "ease" : "constant";
  j["pixel_noise_sigma"] = c.pixel_noise_sigma;
  j["dropout_rate"] = c.dropout_rate;
  j["frame_rate"] = c.frame_rate;
  j["seed"] = c.seed;
  j["intrinsics"] = {{"fx", c.intrinsics.fx}, {"fy", c.intrinsics.fy}, {"cx", c.intrinsics.cx},
                     {"cy", c.intrinsics.cy}, {"width", c.intrinsics.width}, {"height", c.intrinsics.height}};
  j["sphere"] = {{"radius", c.sphere.radius},
                 {"marker_size", c.sphere.marker_size},
                 {"tip_offset", detail::pose_json(c.sphere.tip_offset)}};
  json cam;
  switch (c.camera.kind) {
    case CameraPathKind::Static: cam["kind"] = "static"; break;
    case CameraPathKind::Orbit: cam["kind"] = "orbit"; break;
    case CameraPathKind::Explicit: cam["kind"] = "explicit"; break;
  }
  json poses = json::array();
  for (const auto& p : c.camera.poses) poses.push_back(detail::pose_json(p));
  cam["poses"] = poses;
  cam["target"] = {c.camera.target.x(), c.camera.target.y(), c.camera.target.z()};
  cam["radius"] = c.camera.radius;
  cam["height"] = c.camera.height;
  cam["start_angle"] = c.camera.start_angle;
  cam["angular_rate"] = c.camera.angular_rate;
  cam["jitter_position"] = c.camera.jitter_position;
  cam["jitter_rotation"] = c.camera.jitter_rotation;
  cam["follow"] = c.camera.follow;
  j["camera"] = cam;
  return j.dump(2) + "\n";
}

}  // namespace funcgraph
