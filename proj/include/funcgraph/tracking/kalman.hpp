#pragma once

#include "funcgraph/geometry/pose.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace funcgraph {

// Tunables of the adaptive constant-velocity pose filter.
struct FilterConfig {
  // Measurement noise grows as R0 * (1 + alpha * rmse^2), rmse in pixels.
  double alpha = 1.0;                // px^-2
  double sigma_position = 0.002;     // R0 position std, meters
  double sigma_rotation = 0.01;      // R0 rotation std, radians
  double sigma_acc = 0.5;            // white-noise acceleration, m/s^2
  double sigma_ang_acc = 2.0;        // white-noise angular acceleration, rad/s^2
  double initial_velocity_sigma = 1.0;          // m/s
  double initial_angular_velocity_sigma = 3.0;  // rad/s
  // Run a Rauch-Tung-Striebel backward pass after filtering.
  bool smooth = false;

  void validate() const;
};

struct PoseMeasurement {
  double timestamp = 0.0;
  Pose pose;
  double reproj_rmse = 0.0;
};

struct FilteredPose {
  double timestamp = 0.0;
  Pose pose;
  Vec3 rotation_vector = Vec3::Zero();  // unwrapped, continuous along the sequence
};

using StateVector = Eigen::Matrix<double, 12, 1>;
using StateCovariance = Eigen::Matrix<double, 12, 12>;

// [position, velocity, rotation vector, angular rate]
struct FilterState {
  StateVector x = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();
};

// Causal Kalman filter over position and unwrapped rotation vector with
// constant-velocity dynamics. Covariance updates use the Joseph form.
class PoseKalmanFilter {
 public:
  explicit PoseKalmanFilter(const FilterConfig& config);

  bool initialized() const { return initialized_; }
  const FilterState& state() const { return state_; }
  double time() const { return time_; }

  // First call initializes the state at the measurement; later calls predict
  // to the measurement time and update. Throws NonMonotonicTimestamps.
  void step(const PoseMeasurement& m);
  void predict(double dt);
  void update(const Pose& measured, double reproj_rmse);

  FilteredPose estimate() const;

  static Eigen::Matrix<double, 12, 12> transition(double dt);
  StateCovariance process_noise(double dt) const;

 private:
  FilterConfig config_;
  FilterState state_;
  double time_ = 0.0;
  bool initialized_ = false;
};

// Filters a time-ordered sequence of raw poses; one output per input. Throws
// EmptySequence, NonMonotonicTimestamps.
std::vector<FilteredPose> filter_trajectory(std::span<const PoseMeasurement> raw,
                                            const FilterConfig& config = {});

}  // namespace funcgraph
