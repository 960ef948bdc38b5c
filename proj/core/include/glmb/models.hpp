#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "glmb/error.hpp"
#include "glmb/gaussian.hpp"

namespace glmb {

/// Linear-Gaussian motion: x' = F x + w, w ~ N(0, Q), with per-step survival
/// probability strictly inside (0, 1).
struct MotionModel {
  Eigen::MatrixXd F;
  Eigen::MatrixXd Q;
  double survival_prob = 0.0;
};

/// Nearly-constant-velocity model over `axes` spatial axes with state layout
/// (x1, v1, x2, v2, ...), discretized white-noise acceleration of standard
/// deviation sigma_accel.
MotionModel constant_velocity(int axes, double period, double sigma_accel,
                              double survival_prob);

void validate(const MotionModel& m);

/// One candidate new track per step: born with probability `prob` and state
/// density `density`. The birth label index is the entry's position.
struct BirthEntry {
  double prob = 0.0;
  Gaussian density;
};

struct BirthModel {
  std::vector<BirthEntry> entries;
};

void validate(const BirthModel& b, Eigen::Index state_dim);

/// Linear-Gaussian sensor: z = H x + v, v ~ N(0, R), detection probability
/// strictly inside (0, 1), Poisson clutter uniform over a box region.
struct SensorModel {
  Eigen::MatrixXd H;
  Eigen::MatrixXd R;
  double detect_prob = 0.0;
  double clutter_rate = 0.0;
  std::vector<std::array<double, 2>> region;  // [lo, hi] per measurement axis

  Eigen::Index meas_dim() const { return H.rows(); }

  double region_volume() const {
    double v = 1.0;
    for (const auto& b : region) v *= b[1] - b[0];
    return v;
  }

  bool in_region(const Eigen::VectorXd& z) const {
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (z[i] < region[static_cast<std::size_t>(i)][0] ||
          z[i] > region[static_cast<std::size_t>(i)][1])
        return false;
    return true;
  }

  /// Clutter intensity at z: rate spread uniformly over the region.
  double clutter_density(const Eigen::VectorXd& z) const {
    return in_region(z) ? clutter_rate / region_volume() : 0.0;
  }
};

/// Sensor observing the positions of the given state axes (0 = first axis)
/// with independent noise stds, for the interleaved position/velocity layout.
SensorModel position_sensor(const std::vector<int>& axes, int state_axes,
                            const std::vector<double>& noise_std,
                            double detect_prob, double clutter_rate,
                            const std::vector<std::array<double, 2>>& region);

void validate(const SensorModel& s, Eigen::Index state_dim);

/// The full sensor bank; sensor s in an association tuple refers to
/// sensors[s].
struct MultiSensorSuite {
  std::vector<SensorModel> sensors;

  int count() const { return static_cast<int>(sensors.size()); }
};

void validate(const MultiSensorSuite& suite, Eigen::Index state_dim);

/// Measurements of every sensor at one time step; by_sensor[s][j - 1] is the
/// measurement an association entry j >= 1 at sensor s refers to.
struct MultiScan {
  std::vector<std::vector<Eigen::VectorXd>> by_sensor;

  std::vector<int> sizes() const {
    std::vector<int> m;
    m.reserve(by_sensor.size());
    for (const auto& zs : by_sensor) m.push_back(static_cast<int>(zs.size()));
    return m;
  }
};

}  // namespace glmb
