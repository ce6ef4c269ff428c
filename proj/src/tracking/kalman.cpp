#include "funcgraph/tracking/kalman.hpp"

#include "funcgraph/error.hpp"
#include "funcgraph/geometry/rotation.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace funcgraph {

namespace {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;

constexpr int kPos = 0;
constexpr int kVel = 3;
constexpr int kRot = 6;
constexpr int kRate = 9;

Mat6x12 measurement_matrix() {
  Mat6x12 h = Mat6x12::Zero();
  h.block<3, 3>(0, kPos).setIdentity();
  h.block<3, 3>(3, kRot).setIdentity();
  return h;
}

void symmetrize(StateCovariance& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

void FilterConfig::validate() const {
  const bool ok = alpha >= 0.0 && sigma_position > 0.0 && sigma_rotation > 0.0 && sigma_acc >= 0.0 &&
                  sigma_ang_acc >= 0.0 && initial_velocity_sigma > 0.0 &&
                  initial_angular_velocity_sigma > 0.0 && std::isfinite(alpha) &&
                  std::isfinite(sigma_acc) && std::isfinite(sigma_ang_acc);
  if (!ok) throw Error(ErrorCode::InvalidConfig, "filter noise parameters must be finite and positive");
}

PoseKalmanFilter::PoseKalmanFilter(const FilterConfig& config) : config_(config) { config_.validate(); }

Eigen::Matrix<double, 12, 12> PoseKalmanFilter::transition(double dt) {
  Eigen::Matrix<double, 12, 12> f = Eigen::Matrix<double, 12, 12>::Identity();
  f.block<3, 3>(kPos, kVel) = dt * Mat3::Identity();
  f.block<3, 3>(kRot, kRate) = dt * Mat3::Identity();
  return f;
}

StateCovariance PoseKalmanFilter::process_noise(double dt) const {
  StateCovariance q = StateCovariance::Zero();
  const double dt2 = dt * dt;
  const auto fill = [&](int value, int rate, double sigma) {
    const double s2 = sigma * sigma;
    q.block<3, 3>(value, value) = s2 * dt2 * dt2 / 4.0 * Mat3::Identity();
    q.block<3, 3>(value, rate) = s2 * dt2 * dt / 2.0 * Mat3::Identity();
    q.block<3, 3>(rate, value) = s2 * dt2 * dt / 2.0 * Mat3::Identity();
    q.block<3, 3>(rate, rate) = s2 * dt2 * Mat3::Identity();
  };
  fill(kPos, kVel, config_.sigma_acc);
  fill(kRot, kRate, config_.sigma_ang_acc);
  return q;
}

void PoseKalmanFilter::predict(double dt) {
  if (!(dt >= 0.0)) throw Error(ErrorCode::NonMonotonicTimestamps, "negative time step");
  const auto f = transition(dt);
  state_.x = f * state_.x;
  state_.covariance = f * state_.covariance * f.transpose() + process_noise(dt);
  symmetrize(state_.covariance);
  time_ += dt;
}

void PoseKalmanFilter::update(const Pose& measured, double reproj_rmse) {
  const double inflation = 1.0 + config_.alpha * reproj_rmse * reproj_rmse;
  Vec6 r_diag;
  r_diag << Vec3::Constant(config_.sigma_position * config_.sigma_position),
      Vec3::Constant(config_.sigma_rotation * config_.sigma_rotation);
  const Mat6 r = (inflation * r_diag).asDiagonal();

  Vec6 z;
  z.head<3>() = measured.position();
  z.tail<3>() = unwrap_near(log_map(measured.orientation()), state_.x.segment<3>(kRot));

  const Mat6x12 h = measurement_matrix();
  const Vec6 innovation = z - h * state_.x;
  const Mat6 s = h * state_.covariance * h.transpose() + r;
  const Eigen::Matrix<double, 12, 6> gain =
      s.ldlt().solve(h * state_.covariance.transpose()).transpose();
  state_.x += gain * innovation;
  const StateCovariance i_kh = StateCovariance::Identity() - gain * h;
  state_.covariance = i_kh * state_.covariance * i_kh.transpose() + gain * r * gain.transpose();
  symmetrize(state_.covariance);
}

void PoseKalmanFilter::step(const PoseMeasurement& m) {
  if (!std::isfinite(m.timestamp)) throw Error(ErrorCode::NonMonotonicTimestamps, "non-finite timestamp");
  if (!initialized_) {
    const double inflation = 1.0 + config_.alpha * m.reproj_rmse * m.reproj_rmse;
    state_.x.setZero();
    state_.x.segment<3>(kPos) = m.pose.position();
    state_.x.segment<3>(kRot) = log_map(m.pose.orientation());
    Eigen::Matrix<double, 12, 1> var;
    var << Vec3::Constant(inflation * config_.sigma_position * config_.sigma_position),
        Vec3::Constant(config_.initial_velocity_sigma * config_.initial_velocity_sigma),
        Vec3::Constant(inflation * config_.sigma_rotation * config_.sigma_rotation),
        Vec3::Constant(config_.initial_angular_velocity_sigma * config_.initial_angular_velocity_sigma);
    state_.covariance = var.asDiagonal();
    time_ = m.timestamp;
    initialized_ = true;
    return;
  }
  if (!(m.timestamp > time_)) {
    throw Error(ErrorCode::NonMonotonicTimestamps, "timestamps must be strictly increasing");
  }
  predict(m.timestamp - time_);
  time_ = m.timestamp;
  update(m.pose, m.reproj_rmse);
}

FilteredPose PoseKalmanFilter::estimate() const {
  const Vec3 rv = state_.x.segment<3>(kRot);
  return {time_, Pose(state_.x.segment<3>(kPos), exp_map(rv)), rv};
}

std::vector<FilteredPose> filter_trajectory(std::span<const PoseMeasurement> raw, const FilterConfig& config) {
  if (raw.empty()) throw Error(ErrorCode::EmptySequence, "no poses to filter");
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (!(raw[i].timestamp > raw[i - 1].timestamp)) {
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "timestamp " + std::to_string(i) + " does not increase");
    }
  }
  PoseKalmanFilter filter(config);
  std::vector<FilteredPose> out;
  out.reserve(raw.size());

  // Kept for the optional backward pass.
  std::vector<FilterState> predicted;
  std::vector<FilterState> filtered;
  std::vector<double> dts;
  for (const auto& m : raw) {
    if (filter.initialized()) {
      const double dt = m.timestamp - filter.time();
      filter.predict(dt);
      if (config.smooth) {
        predicted.push_back(filter.state());
        dts.push_back(dt);
      }
      // predict() advanced the clock; step() with the same time only updates.
      filter.update(m.pose, m.reproj_rmse);
    } else {
      filter.step(m);
    }
    if (config.smooth) filtered.push_back(filter.state());
    out.push_back(filter.estimate());
    out.back().timestamp = m.timestamp;
  }

  if (config.smooth && raw.size() > 1) {
    StateVector x_next = filtered.back().x;
    StateCovariance p_next = filtered.back().covariance;
    for (std::size_t i = raw.size() - 1; i-- > 0;) {
      const auto f = PoseKalmanFilter::transition(dts[i]);
      const FilterState& pred = predicted[i];  // prediction of step i+1 from i
      const FilterState& filt = filtered[i];
      const Eigen::Matrix<double, 12, 12> c =
          pred.covariance.ldlt().solve(f * filt.covariance.transpose()).transpose();
      const StateVector x_s = filt.x + c * (x_next - pred.x);
      StateCovariance p_s = filt.covariance + c * (p_next - pred.covariance) * c.transpose();
      symmetrize(p_s);
      const Vec3 rv = x_s.segment<3>(kRot);
      out[i].pose = Pose(x_s.segment<3>(kPos), exp_map(rv));
      out[i].rotation_vector = rv;
      x_next = x_s;
      p_next = p_s;
    }
  }
  return out;
}

}  // namespace funcgraph
