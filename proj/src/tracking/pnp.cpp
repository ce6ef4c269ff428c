#include "funcgraph/tracking/pnp.hpp"

#include "funcgraph/error.hpp"
#include "funcgraph/geometry/rotation.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace funcgraph {

namespace {

using Mat34 = Eigen::Matrix<double, 3, 4>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Vec2 normalized_coords(const Vec2& px, const CameraIntrinsics& k) {
  return {(px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy};
}

// Similarity transform taking points to zero mean and mean distance sqrt(dim).
template <int Dim>
Eigen::Matrix<double, Dim + 1, Dim + 1> normalizer(const std::vector<Eigen::Matrix<double, Dim, 1>>& pts) {
  using V = Eigen::Matrix<double, Dim, 1>;
  V mean = V::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double dist = 0.0;
  for (const auto& p : pts) dist += (p - mean).norm();
  dist /= static_cast<double>(pts.size());
  const double s = dist > 0.0 ? std::sqrt(static_cast<double>(Dim)) / dist : 1.0;
  Eigen::Matrix<double, Dim + 1, Dim + 1> t = Eigen::Matrix<double, Dim + 1, Dim + 1>::Identity();
  t.template topLeftCorner<Dim, Dim>() *= s;
  t.template topRightCorner<Dim, 1>() = -s * mean;
  return t;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

// Camera projection matrix (normalized coordinates) by the direct linear
// transform; needs >= 6 non-coplanar points.
Pose dlt_init(std::span<const Correspondence> cs, const CameraIntrinsics& k) {
  std::vector<Vec3> obj;
  std::vector<Vec2> img;
  for (const auto& c : cs) {
    obj.push_back(c.object);
    img.push_back(normalized_coords(c.image, k));
  }
  const Eigen::Matrix4d t3 = normalizer<3>(obj);
  const Eigen::Matrix3d t2 = normalizer<2>(img);

  Eigen::MatrixXd a(2 * cs.size(), 12);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Eigen::Vector4d x = t3 * obj[i].homogeneous();
    const Vec3 m = t2 * img[i].homogeneous();
    const auto r0 = static_cast<Eigen::Index>(2 * i);
    a.row(r0) << x.transpose(), Eigen::RowVector4d::Zero(), -m.x() * x.transpose();
    a.row(r0 + 1) << Eigen::RowVector4d::Zero(), x.transpose(), -m.y() * x.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd v = svd.matrixV().col(11);
  Mat34 p_hat;
  p_hat << v.segment<4>(0).transpose(), v.segment<4>(4).transpose(), v.segment<4>(8).transpose();
  Mat34 p = t2.inverse() * p_hat * t3;

  if (p.leftCols<3>().determinant() < 0.0) p = -p;
  Eigen::JacobiSVD<Mat3> msvd(p.leftCols<3>(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double scale = msvd.singularValues().mean();
  const Mat3 r = nearest_rotation(p.leftCols<3>());
  const Vec3 t = p.col(3) / scale;
  return {t, r};
}

// Plane-induced homography decomposition. Exact for coplanar model points and
// a usable starting point for nearly coplanar ones.
Pose homography_init(std::span<const Correspondence> cs, const CameraIntrinsics& k) {
  Vec3 c = Vec3::Zero();
  for (const auto& x : cs) c += x.object;
  c /= static_cast<double>(cs.size());
  Eigen::MatrixXd centered(cs.size(), 3);
  for (std::size_t i = 0; i < cs.size(); ++i) centered.row(static_cast<Eigen::Index>(i)) = (cs[i].object - c).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> psvd(centered, Eigen::ComputeThinV);
  Mat3 basis = psvd.matrixV();
  basis.col(2) = basis.col(0).cross(basis.col(1));

  std::vector<Vec2> plane;
  std::vector<Vec2> img;
  for (const auto& x : cs) {
    const Vec3 local = basis.transpose() * (x.object - c);
    plane.emplace_back(local.x(), local.y());
    img.push_back(normalized_coords(x.image, k));
  }
  const Mat3 tp = normalizer<2>(plane);
  const Mat3 ti = normalizer<2>(img);
  Eigen::MatrixXd a(2 * cs.size(), 9);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Vec3 x = tp * plane[i].homogeneous();
    const Vec3 m = ti * img[i].homogeneous();
    const auto r0 = static_cast<Eigen::Index>(2 * i);
    a.row(r0) << x.transpose(), Eigen::RowVector3d::Zero(), -m.x() * x.transpose();
    a.row(r0 + 1) << Eigen::RowVector3d::Zero(), x.transpose(), -m.y() * x.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd v = svd.matrixV().col(8);
  Mat3 h_hat;
  h_hat << v.segment<3>(0).transpose(), v.segment<3>(3).transpose(), v.segment<3>(6).transpose();
  Mat3 h = ti.inverse() * h_hat * tp;

  const double lambda = 0.5 * (h.col(0).norm() + h.col(1).norm());
  h /= lambda;
  if (h(2, 2) < 0.0) h = -h;  // plane origin in front of the camera
  Mat3 r_plane;
  r_plane.col(0) = h.col(0);
  r_plane.col(1) = h.col(1);
  r_plane.col(2) = h.col(0).cross(h.col(1));
  r_plane = nearest_rotation(r_plane);
  const Vec3 t_plane = h.col(2);

  const Mat3 r = r_plane * basis.transpose();
  return {t_plane - r * c, r};
}

struct Linearization {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd residual;
};

double cost_of(std::span<const Correspondence> cs, const Mat3& r, const Vec3& t, const CameraIntrinsics& k) {
  double cost = 0.0;
  for (const auto& c : cs) {
    const Vec3 p = r * c.object + t;
    if (!(p.z() > 0.0)) return std::numeric_limits<double>::infinity();
    const Vec2 uv(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
    cost += (uv - c.image).squaredNorm();
  }
  return cost;
}

Linearization linearize(std::span<const Correspondence> cs, const Mat3& r, const Vec3& t, const CameraIntrinsics& k) {
  Linearization lin{Eigen::MatrixXd(2 * cs.size(), 6), Eigen::VectorXd(2 * cs.size())};
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Vec3 rx = r * cs[i].object;
    const Vec3 p = rx + t;
    const double iz = 1.0 / p.z();
    Eigen::Matrix<double, 2, 3> d_proj;
    d_proj << k.fx * iz, 0.0, -k.fx * p.x() * iz * iz, 0.0, k.fy * iz, -k.fy * p.y() * iz * iz;
    const auto row = static_cast<Eigen::Index>(2 * i);
    lin.jacobian.block<2, 3>(row, 0) = -d_proj * skew(rx);
    lin.jacobian.block<2, 3>(row, 3) = d_proj;
    lin.residual.segment<2>(row) =
        Vec2(k.fx * p.x() * iz + k.cx, k.fy * p.y() * iz + k.cy) - cs[i].image;
  }
  return lin;
}

}  // namespace

double reprojection_rmse(std::span<const Correspondence> cs, const Pose& cam_from_model,
                         const CameraIntrinsics& k) {
  if (cs.empty()) return 0.0;
  return std::sqrt(cost_of(cs, cam_from_model.rotation_matrix(), cam_from_model.position(), k) /
                   static_cast<double>(cs.size()));
}

PnPResult solve_pnp(std::span<const Correspondence> cs, const CameraIntrinsics& k,
                    const PnPOptions& options) {
  if (cs.size() < 4) {
    throw Error(ErrorCode::TooFewPoints, "PnP needs at least 4 correspondences, got " + std::to_string(cs.size()));
  }
  for (const auto& c : cs) {
    if (!c.object.allFinite() || !c.image.allFinite()) {
      throw Error(ErrorCode::DegenerateConfiguration, "non-finite correspondence");
    }
  }

  // Shape of the model points decides the initializer.
  Vec3 mean = Vec3::Zero();
  for (const auto& c : cs) mean += c.object;
  mean /= static_cast<double>(cs.size());
  Eigen::MatrixXd centered(cs.size(), 3);
  for (std::size_t i = 0; i < cs.size(); ++i) centered.row(static_cast<Eigen::Index>(i)) = (cs[i].object - mean).transpose();
  const Vec3 sv = Eigen::JacobiSVD<Eigen::MatrixXd>(centered).singularValues();
  if (!(sv[0] > 0.0) || sv[1] < 1e-9 * sv[0]) {
    throw Error(ErrorCode::DegenerateConfiguration, "model points are collinear");
  }
  const bool planar = sv[2] < 1e-6 * sv[0];

  Pose init = (!planar && cs.size() >= 6) ? dlt_init(cs, k) : homography_init(cs, k);
  Mat3 r = init.rotation_matrix();
  Vec3 t = init.position();
  double cost = cost_of(cs, r, t, k);
  if (!std::isfinite(cost) && !planar) {
    // DLT landed on the mirrored solution; the homography is always in front.
    init = homography_init(cs, k);
    r = init.rotation_matrix();
    t = init.position();
    cost = cost_of(cs, r, t, k);
  }
  if (!std::isfinite(cost)) {
    throw Error(ErrorCode::NoConvergence, "initial pose places model points behind the camera");
  }

  const double n = static_cast<double>(cs.size());
  PnPResult result;
  result.n_points = static_cast<int>(cs.size());
  result.rmse_history.push_back(std::sqrt(cost / n));

  double mu = 1e-3;
  bool converged = cost == 0.0;
  int iter = 0;
  while (!converged && iter < options.max_iterations) {
    ++iter;
    const Linearization lin = linearize(cs, r, t, k);
    const Mat6 h = lin.jacobian.transpose() * lin.jacobian;
    const Vec6 g = lin.jacobian.transpose() * lin.residual;
    bool accepted = false;
    while (!accepted) {
      Mat6 damped = h;
      damped.diagonal() += mu * h.diagonal().cwiseMax(1e-12);
      const Vec6 delta = damped.ldlt().solve(-g);
      const Mat3 r_new = exp_map(delta.head<3>()).toRotationMatrix() * r;
      const Vec3 t_new = t + delta.tail<3>();
      const double cost_new = cost_of(cs, r_new, t_new, k);
      if (cost_new < cost) {
        accepted = true;
        r = r_new;
        t = t_new;
        const double decrease = cost - cost_new;
        cost = cost_new;
        mu = std::max(mu / 3.0, 1e-12);
        result.rmse_history.push_back(std::sqrt(cost / n));
        if (delta.norm() < options.step_tolerance || decrease <= 1e-15 * cost) converged = true;
      } else {
        mu *= 4.0;
        // No descent direction left within rounding: at the minimum.
        if (mu > 1e12 || delta.norm() < options.step_tolerance) {
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NoConvergence, "PnP did not converge in " + std::to_string(options.max_iterations) + " iterations");
  }

  const Linearization lin = linearize(cs, r, t, k);
  const Mat6 h = lin.jacobian.transpose() * lin.jacobian;
  const Eigen::SelfAdjointEigenSolver<Mat6> eig(h);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > options.max_condition) {
    throw Error(ErrorCode::DegenerateConfiguration, "PnP normal equations are ill-conditioned");
  }

  result.pose = Pose(t, r);
  result.reproj_rmse = std::sqrt(cost / n);
  result.iterations = iter;
  return result;
}

}  // namespace funcgraph
