#include "funcgraph/geometry/rotation.hpp"

#include "funcgraph/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace funcgraph {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSmallAngle = 1e-12;
}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<    0.0, -v.z(),  v.y(),
        v.z(),    0.0, -v.x(),
       -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

Vec3 log_map(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < kSmallAngle) {
    return 2.0 * v / q.w();
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return v * (angle / s);
}

Quat exp_map(const Vec3& r) {
  const double angle = r.norm();
  if (angle < kSmallAngle) {
    return Quat(1.0, 0.5 * r.x(), 0.5 * r.y(), 0.5 * r.z()).normalized();
  }
  const double half = 0.5 * angle;
  const Vec3 v = r * (std::sin(half) / angle);
  return Quat(std::cos(half), v.x(), v.y(), v.z());
}

double geodesic_angle(const Quat& q1, const Quat& q2) {
  const Quat d = q1.normalized().conjugate() * q2.normalized();
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

Vec3 unwrap_near(const Vec3& r, const Vec3& reference) {
  const double angle = r.norm();
  if (angle < kSmallAngle) {
    // Identity: equivalent vectors are 2*pi*m along any axis.
    const double ref_norm = reference.norm();
    const double m = std::round(ref_norm / kTwoPi);
    if (m == 0.0) return r;
    return reference * (kTwoPi * m / ref_norm) + r;
  }
  const Vec3 axis = r / angle;
  const double along = axis.dot(reference);
  const double m0 = std::round((along - angle) / kTwoPi);
  Vec3 best = r;
  double best_dist = std::numeric_limits<double>::infinity();
  for (double m = m0 - 1.0; m <= m0 + 1.0; m += 1.0) {
    const Vec3 candidate = axis * (angle + kTwoPi * m);
    const double dist = (candidate - reference).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = candidate;
    }
  }
  return best;
}

RotationVectorSequence unwrap_rotations(std::span<const Quat> quats) {
  if (quats.empty()) throw Error(ErrorCode::EmptySequence, "unwrap_rotations needs at least one rotation");
  RotationVectorSequence out;
  out.reserve(quats.size());
  out.push_back(log_map(quats.front()));
  for (std::size_t i = 1; i < quats.size(); ++i) {
    out.push_back(unwrap_near(log_map(quats[i]), out.back()));
  }
  return out;
}

}  // namespace funcgraph
