#include "funcgraph/geometry/pose.hpp"

#include <cmath>

namespace funcgraph {

Quat canonical(const Quat& q) {
  // Already-unit input is left untouched so that repeated canonicalization is
  // bit-stable (serialization round-trips depend on it).
  Quat n = q;
  if (std::abs(n.squaredNorm() - 1.0) > 1e-15) n.normalize();
  bool flip = n.w() < 0.0;
  if (n.w() == 0.0) {
    if (n.x() != 0.0) {
      flip = n.x() < 0.0;
    } else if (n.y() != 0.0) {
      flip = n.y() < 0.0;
    } else {
      flip = n.z() < 0.0;
    }
  }
  if (flip) n.coeffs() = -n.coeffs();
  return n;
}

Pose::Pose(const Vec3& position, const Quat& orientation)
    : position_(position), orientation_(canonical(orientation)) {}

Pose::Pose(const Vec3& position, const Mat3& rotation)
    : position_(position), orientation_(canonical(Quat(rotation))) {}

Pose Pose::translation(double x, double y, double z) { return {Vec3(x, y, z), Quat::Identity()}; }

Pose Pose::rotation(const Vec3& axis, double angle_rad) {
  return {Vec3::Zero(), Quat(Eigen::AngleAxisd(angle_rad, axis.normalized()))};
}

Pose Pose::from_array(std::span<const double, 7> a) {
  // Eigen's constructor takes (w, x, y, z).
  return {Vec3(a[0], a[1], a[2]), Quat(a[6], a[3], a[4], a[5])};
}

std::array<double, 7> Pose::to_array() const {
  return {position_.x(),    position_.y(),    position_.z(),   orientation_.x(),
          orientation_.y(), orientation_.z(), orientation_.w()};
}

Pose compose(const Pose& a, const Pose& b) {
  return {a.orientation() * b.position() + a.position(), a.orientation() * b.orientation()};
}

Pose invert(const Pose& p) {
  const Quat q_inv = p.orientation().conjugate();
  return {-(q_inv * p.position()), q_inv};
}

}  // namespace funcgraph
