#pragma once

#include "funcgraph/geometry/pose.hpp"

#include <span>
#include <vector>

namespace funcgraph {

// Rotation vectors (axis * angle, radians) aligned with a pose sequence.
using RotationVectorSequence = std::vector<Vec3>;

Mat3 skew(const Vec3& v);

// Principal log map: |result| in [0, pi].
Vec3 log_map(const Quat& q);
Quat exp_map(const Vec3& rotation_vector);

// Angle of q1^-1 q2 in [0, pi]; q and -q compare equal.
double geodesic_angle(const Quat& q1, const Quat& q2);

// Among all rotation vectors equivalent to `rotation_vector` (2*pi shifts along
// the axis, which include the sign flips), returns the one nearest `reference`.
Vec3 unwrap_near(const Vec3& rotation_vector, const Vec3& reference);

// Log map of each quaternion, each entry unwrapped against its predecessor.
// Throws EmptySequence on empty input.
RotationVectorSequence unwrap_rotations(std::span<const Quat> quats);

}  // namespace funcgraph
