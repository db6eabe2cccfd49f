#pragma once

#include <Eigen/Dense>

#include "osmot/box.hpp"

namespace osmot {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Vector4d;
using MeasurementCovariance = Eigen::Matrix4d;

/// Constant-velocity state over (cx, cy, aspect, height) and their rates.
struct KalmanTrackState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();

  Box box() const;
};

/// Noise standard deviations scale with the box height.
struct KalmanConfig {
  double std_weight_position = 1.0 / 20;
  double std_weight_velocity = 1.0 / 160;
};

struct MeasurementProjection {
  MeasurementVector mean;
  MeasurementCovariance covariance;
};

/// (cx, cy, w / h, h).
MeasurementVector to_measurement(const Box& b);

KalmanTrackState kalman_initiate(const Box& measurement, const KalmanConfig& cfg = {});
KalmanTrackState kalman_predict(const KalmanTrackState& s, const KalmanConfig& cfg = {});
MeasurementProjection kalman_project(const KalmanTrackState& s, const KalmanConfig& cfg = {});
KalmanTrackState kalman_update(const KalmanTrackState& s, const Box& measurement,
                               const KalmanConfig& cfg = {});

/// Squared Mahalanobis distance of a measurement from the projected state.
double gating_distance(const KalmanTrackState& s, const Box& measurement,
                       const KalmanConfig& cfg = {});

}  // namespace osmot
