#include "osmot/kalman.hpp"

#include "osmot/errors.hpp"

namespace osmot {

namespace {

Eigen::Matrix<double, 8, 8> transition() {
  Eigen::Matrix<double, 8, 8> f = Eigen::Matrix<double, 8, 8>::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

Eigen::Matrix<double, 4, 8> observation() {
  Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
  h.leftCols<4>().setIdentity();
  return h;
}

}  // namespace

Box KalmanTrackState::box() const {
  const double h = mean(3);
  return {mean(0), mean(1), mean(2) * h, h};
}

MeasurementVector to_measurement(const Box& b) {
  if (!(b.h > 0)) throw InvalidInputError("measurement box must have positive height");
  return {b.cx, b.cy, b.w / b.h, b.h};
}

KalmanTrackState kalman_initiate(const Box& measurement, const KalmanConfig& cfg) {
  const MeasurementVector z = to_measurement(measurement);
  KalmanTrackState s;
  s.mean.head<4>() = z;
  s.mean.tail<4>().setZero();
  const double h = z(3);
  StateVector std;
  std << 2 * cfg.std_weight_position * h, 2 * cfg.std_weight_position * h, 1e-2,
      2 * cfg.std_weight_position * h, 10 * cfg.std_weight_velocity * h,
      10 * cfg.std_weight_velocity * h, 1e-5, 10 * cfg.std_weight_velocity * h;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

KalmanTrackState kalman_predict(const KalmanTrackState& s, const KalmanConfig& cfg) {
  static const Eigen::Matrix<double, 8, 8> f = transition();
  const double h = s.mean(3);
  StateVector std;
  std << cfg.std_weight_position * h, cfg.std_weight_position * h, 1e-2,
      cfg.std_weight_position * h, cfg.std_weight_velocity * h, cfg.std_weight_velocity * h,
      1e-5, cfg.std_weight_velocity * h;
  const StateCovariance motion = std.array().square().matrix().asDiagonal();

  KalmanTrackState out;
  out.mean = f * s.mean;
  if (out.mean(3) <= 0) {
    // A shrinking box must not collapse; stop the height rate instead.
    out.mean(3) = h;
    out.mean(7) = 0;
  }
  out.covariance = f * s.covariance * f.transpose() + motion;
  return out;
}

MeasurementProjection kalman_project(const KalmanTrackState& s, const KalmanConfig& cfg) {
  static const Eigen::Matrix<double, 4, 8> hm = observation();
  const double h = s.mean(3);
  MeasurementVector std;
  std << cfg.std_weight_position * h, cfg.std_weight_position * h, 1e-1,
      cfg.std_weight_position * h;
  MeasurementProjection p;
  p.mean = hm * s.mean;
  p.covariance = hm * s.covariance * hm.transpose();
  p.covariance += MeasurementCovariance(std.array().square().matrix().asDiagonal());
  return p;
}

KalmanTrackState kalman_update(const KalmanTrackState& s, const Box& measurement,
                               const KalmanConfig& cfg) {
  static const Eigen::Matrix<double, 4, 8> hm = observation();
  const MeasurementVector z = to_measurement(measurement);
  const MeasurementProjection proj = kalman_project(s, cfg);
  const Eigen::LLT<MeasurementCovariance> chol(proj.covariance);
  if (chol.info() != Eigen::Success) {
    throw InvalidInputError("kalman_update: innovation covariance not positive definite");
  }
  // K = P Hᵀ S⁻¹, solved as S Kᵀ = H P.
  const Eigen::Matrix<double, 4, 8> kt = chol.solve(hm * s.covariance);
  const Eigen::Matrix<double, 8, 4> gain = kt.transpose();

  KalmanTrackState out;
  out.mean = s.mean + gain * (z - proj.mean);
  out.covariance = s.covariance - gain * proj.covariance * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

double gating_distance(const KalmanTrackState& s, const Box& measurement,
                       const KalmanConfig& cfg) {
  const MeasurementProjection proj = kalman_project(s, cfg);
  const MeasurementVector d = to_measurement(measurement) - proj.mean;
  const Eigen::LLT<MeasurementCovariance> chol(proj.covariance);
  const MeasurementVector z = chol.matrixL().solve(d);
  return z.squaredNorm();
}

}  // namespace osmot
