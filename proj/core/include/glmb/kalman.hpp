#pragma once

#include <Eigen/Dense>
#include <vector>

#include "glmb/gaussian.hpp"
#include "glmb/models.hpp"

namespace glmb {

/// Chapman-Kolmogorov prediction through the motion model.
Gaussian kalman_predict(const Gaussian& g, const MotionModel& m);

struct KalmanUpdate {
  Gaussian posterior;
  double likelihood;  // N(z; H mean, H cov H' + R)
};

/// Conjugate update with one measurement; covariance in Joseph form. Throws
/// numeric_failure if the innovation covariance is not positive definite.
KalmanUpdate kalman_update(const Gaussian& g, const SensorModel& s,
                           const Eigen::VectorXd& z);

struct DetectionFactor {
  Gaussian posterior;
  double weight;
};

/// Single-sensor association factor. j = 0 is a missed detection: density
/// unchanged, weight 1 - P_D. j in 1..|Z| updates with measurement j and
/// weighs it by likelihood * P_D / clutter_density(z_j). The measurement must
/// lie inside the sensor region, so the clutter density is positive.
DetectionFactor detection_factor(const Gaussian& g, const SensorModel& s,
                                 int j, const std::vector<Eigen::VectorXd>& Z);

/// Multi-sensor association factor: detection_factor chained through every
/// sensor in order, weights multiplied. tuple[s] in {0..M(s)}. The combined
/// weight does not depend on the sensor order.
DetectionFactor association_chain(const Gaussian& g,
                                  const MultiSensorSuite& suite,
                                  const std::vector<int>& tuple,
                                  const MultiScan& scan);

}  // namespace glmb
