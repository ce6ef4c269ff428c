#include "funcgraph/articulation/articulation_fit.hpp"

#include "funcgraph/error.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace funcgraph {

namespace {

struct Centered {
  Vec3 centroid;
  Eigen::MatrixXd points;  // n x 3
};

Centered center_points(std::span<const Vec3> positions) {
  Centered c{Vec3::Zero(), Eigen::MatrixXd(positions.size(), 3)};
  for (const auto& p : positions) {
    if (!p.allFinite()) throw Error(ErrorCode::DegenerateTrajectory, "non-finite trajectory position");
    c.centroid += p;
  }
  c.centroid /= static_cast<double>(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    c.points.row(static_cast<Eigen::Index>(i)) = (positions[i] - c.centroid).transpose();
  }
  return c;
}

double wrap_angle(double a) {
  return std::remainder(a, 2.0 * std::numbers::pi);
}

struct Circle2 {
  Vec2 center;
  double radius;
};

double radial_cost(const std::vector<Vec2>& q, const Circle2& c) {
  double cost = 0.0;
  for (const auto& p : q) {
    const double d = (p - c.center).norm() - c.radius;
    cost += d * d;
  }
  return cost;
}

std::optional<Circle2> algebraic_circle(const std::vector<Vec2>& q) {
  Eigen::MatrixXd a(q.size(), 3);
  Eigen::VectorXd b(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    a.row(row) << q[i].x(), q[i].y(), 1.0;
    b[row] = -q[i].squaredNorm();
  }
  const Vec3 sol = a.colPivHouseholderQr().solve(b);
  const Vec2 center(-0.5 * sol[0], -0.5 * sol[1]);
  const double r2 = center.squaredNorm() - sol[2];
  if (!(r2 > 0.0) || !std::isfinite(r2)) return std::nullopt;
  return Circle2{center, std::sqrt(r2)};
}

// Levenberg-Marquardt on sum (|q_i - c| - r)^2 over (cx, cy, r).
Circle2 refine_circle(const std::vector<Vec2>& q, Circle2 c) {
  constexpr int kMaxIterations = 200;
  constexpr double kStepTolerance = 1e-12;
  double cost = radial_cost(q, c);
  double mu = 1e-3;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (const auto& p : q) {
      const Vec2 diff = p - c.center;
      const double dist = diff.norm();
      if (!(dist > 0.0)) continue;
      const Eigen::Vector3d j(-diff.x() / dist, -diff.y() / dist, -1.0);
      const double res = dist - c.radius;
      h += j * j.transpose();
      g += j * res;
    }
    bool accepted = false;
    bool done = false;
    while (!accepted) {
      Eigen::Matrix3d damped = h;
      damped.diagonal() += mu * h.diagonal().cwiseMax(1e-300);
      const Eigen::Vector3d delta = damped.ldlt().solve(-g);
      if (!delta.allFinite()) {
        done = true;
        break;
      }
      const Circle2 cand{c.center + delta.head<2>(), c.radius + delta[2]};
      const double cand_cost = radial_cost(q, cand);
      if (cand.radius > 0.0 && cand_cost < cost) {
        accepted = true;
        c = cand;
        cost = cand_cost;
        mu = std::max(mu / 3.0, 1e-15);
        if (delta.norm() < kStepTolerance * std::max(1.0, c.radius)) done = true;
      } else {
        mu *= 4.0;
        if (mu > 1e12 || delta.norm() < kStepTolerance * std::max(1.0, c.radius)) {
          done = true;
          break;
        }
      }
    }
    if (done) break;
  }
  return c;
}

}  // namespace

std::vector<Vec3> positions_of(std::span<const Pose> trajectory) {
  std::vector<Vec3> out;
  out.reserve(trajectory.size());
  for (const auto& p : trajectory) out.push_back(p.position());
  return out;
}

PrismaticFit fit_prismatic(std::span<const Vec3> positions) {
  if (positions.size() < 2) throw Error(ErrorCode::DegenerateTrajectory, "line fit needs at least 2 points");
  const Centered c = center_points(positions);
  if (c.points.rowwise().norm().maxCoeff() < 1e-9) {
    throw Error(ErrorCode::DegenerateTrajectory, "all trajectory points coincide");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.points, Eigen::ComputeThinV);
  Vec3 d = svd.matrixV().col(0).normalized();
  if (d.dot(positions.back() - positions.front()) < 0.0) d = -d;

  PrismaticFit fit;
  fit.direction = d;
  fit.center = c.centroid;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sq = 0.0;
  for (Eigen::Index i = 0; i < c.points.rows(); ++i) {
    const Vec3 x = c.points.row(i).transpose();
    const double along = x.dot(d);
    lo = std::min(lo, along);
    hi = std::max(hi, along);
    sq += (x - along * d).squaredNorm();
  }
  fit.residual_rmse = std::sqrt(sq / static_cast<double>(positions.size()));
  fit.travel = hi - lo;
  return fit;
}

RevoluteFit fit_revolute(std::span<const Vec3> positions) {
  if (positions.size() < 3) throw Error(ErrorCode::CollinearPoints, "circle fit needs at least 3 points");
  const Centered c = center_points(positions);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.points, Eigen::ComputeThinV);
  const Vec3 sv = svd.singularValues();
  if (!(sv[0] > 1e-12) || sv[1] <= 1e-9 * sv[0]) {
    throw Error(ErrorCode::CollinearPoints, "trajectory points are collinear");
  }
  Vec3 normal = svd.matrixV().col(2).normalized();
  const Vec3 e1 = svd.matrixV().col(0).normalized();
  const Vec3 e2 = normal.cross(e1);

  std::vector<Vec2> q;
  q.reserve(positions.size());
  double out_of_plane = 0.0;
  for (Eigen::Index i = 0; i < c.points.rows(); ++i) {
    const Vec3 x = c.points.row(i).transpose();
    q.emplace_back(x.dot(e1), x.dot(e2));
    const double h = x.dot(normal);
    out_of_plane += h * h;
  }

  const std::optional<Circle2> initial = algebraic_circle(q);
  if (!initial) throw Error(ErrorCode::CollinearPoints, "algebraic circle fit is degenerate");
  Circle2 circle = refine_circle(q, *initial);
  if (!(radial_cost(q, circle) <= radial_cost(q, *initial))) circle = *initial;
  if (!circle.center.allFinite() || !std::isfinite(circle.radius) || !(circle.radius > 0.0)) {
    throw Error(ErrorCode::NoConvergence, "circle refinement diverged");
  }

  double radial = 0.0;
  for (const auto& p : q) {
    const double d = (p - circle.center).norm() - circle.radius;
    radial += d * d;
  }

  // Unwrapped angle along the trajectory; its most extreme excursion fixes the
  // turning direction, its range is the sweep.
  double cumulative = 0.0;
  double extreme = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double prev = std::atan2(q[0].y() - circle.center.y(), q[0].x() - circle.center.x());
  for (std::size_t i = 1; i < q.size(); ++i) {
    const double a = std::atan2(q[i].y() - circle.center.y(), q[i].x() - circle.center.x());
    cumulative += wrap_angle(a - prev);
    prev = a;
    if (std::abs(cumulative) > std::abs(extreme)) extreme = cumulative;
    lo = std::min(lo, cumulative);
    hi = std::max(hi, cumulative);
  }
  if (extreme < 0.0) normal = -normal;

  RevoluteFit fit;
  fit.direction = normal;
  fit.center = c.centroid + circle.center.x() * e1 + circle.center.y() * e2;
  fit.radius = circle.radius;
  fit.residual_rmse = std::sqrt((radial + out_of_plane) / static_cast<double>(positions.size()));
  fit.sweep = std::clamp(hi - lo, std::numeric_limits<double>::min(), 2.0 * std::numbers::pi);
  return fit;
}

JointVerdict select_joint(std::span<const Vec3> positions, const SelectionConfig& config) {
  if (positions.size() < 3) {
    throw Error(ErrorCode::DegenerateTrajectory, "joint selection needs at least 3 points");
  }
  const double n = static_cast<double>(positions.size());
  const double lambda = config.lambda.value_or(std::log(n));
  const auto score = [&](double rmse, int k) {
    return n * std::log(rmse * rmse + config.epsilon) + lambda * static_cast<double>(k);
  };

  JointVerdict v;
  v.prismatic = fit_prismatic(positions);
  v.scores.prismatic = score(v.prismatic.residual_rmse, config.prismatic_params);
  v.scores.revolute = std::numeric_limits<double>::infinity();
  try {
    v.revolute = fit_revolute(positions);
    v.scores.revolute = score(v.revolute->residual_rmse, config.revolute_params);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CollinearPoints && e.code() != ErrorCode::NoConvergence) throw;
  }

  if (v.revolute && v.scores.revolute < v.scores.prismatic) {
    v.joint_type = JointType::Revolute;
    v.axis = {JointType::Revolute, v.revolute->center, v.revolute->direction, v.revolute->sweep};
    v.low_confidence = v.revolute->sweep < config.low_confidence_sweep;
  } else {
    v.joint_type = JointType::Prismatic;
    v.axis = {JointType::Prismatic, v.prismatic.center, v.prismatic.direction, v.prismatic.travel};
  }
  return v;
}

}  // namespace funcgraph
