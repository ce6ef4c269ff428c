#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <span>

namespace funcgraph {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Rigid transform x_out = R * x_in + t (column-vector convention).
//
// A Pose named `a_from_b` (written T_a<-b in comments) maps coordinates
// expressed in frame b into frame a. The orientation is a unit quaternion
// stored with a non-negative scalar part; the 7-number array form used by
// every file format is [x, y, z, qx, qy, qz, qw] (scalar last).
class Pose {
 public:
  Pose() = default;
  Pose(const Vec3& position, const Quat& orientation);
  Pose(const Vec3& position, const Mat3& rotation);

  static Pose identity() { return {}; }
  static Pose translation(double x, double y, double z);
  static Pose rotation(const Vec3& axis, double angle_rad);
  static Pose from_array(std::span<const double, 7> xyz_qxyzw);

  const Vec3& position() const { return position_; }
  const Quat& orientation() const { return orientation_; }
  Mat3 rotation_matrix() const { return orientation_.toRotationMatrix(); }

  Vec3 apply(const Vec3& local) const { return orientation_ * local + position_; }
  std::array<double, 7> to_array() const;

 private:
  Vec3 position_ = Vec3::Zero();
  Quat orientation_ = Quat::Identity();
};

// a ∘ b: apply b first, then a.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);

inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

// Normalizes and flips the quaternion so that w >= 0 (w == 0 resolved by the
// first non-zero vector component being positive).
Quat canonical(const Quat& q);

}  // namespace funcgraph

namespace funcgraph {

struct TimedPose {
  double timestamp = 0.0;  // seconds
  Pose pose;
};

}  // namespace funcgraph
