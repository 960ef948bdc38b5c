#include "glmb/kalman.hpp"

#include <cmath>

namespace glmb {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_probability(double p, const char* what) {
  if (!(p > 0.0) || !(p < 1.0))
    throw invalid_model(std::string(what) + " must lie strictly inside (0, 1)");
}

void check_psd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw invalid_model(std::string(what) + " is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw invalid_model(std::string(what) + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw invalid_model(std::string(what) + " is not positive semidefinite");
}

}  // namespace

MotionModel constant_velocity(int axes, double period, double sigma_accel,
                              double survival_prob) {
  if (axes < 1) throw invalid_model("need at least one axis");
  if (!(period > 0.0)) throw invalid_model("period must be positive");
  if (sigma_accel < 0.0) throw invalid_model("sigma_accel must be >= 0");
  const int d = 2 * axes;
  MotionModel m;
  m.F = Eigen::MatrixXd::Identity(d, d);
  m.Q = Eigen::MatrixXd::Zero(d, d);
  const double t = period;
  const double s2 = sigma_accel * sigma_accel;
  for (int a = 0; a < axes; ++a) {
    const int p = 2 * a;
    m.F(p, p + 1) = t;
    m.Q(p, p) = s2 * t * t * t * t / 4.0;
    m.Q(p, p + 1) = m.Q(p + 1, p) = s2 * t * t * t / 2.0;
    m.Q(p + 1, p + 1) = s2 * t * t;
  }
  m.survival_prob = survival_prob;
  validate(m);
  return m;
}

void validate(const MotionModel& m) {
  if (m.F.rows() != m.F.cols()) throw invalid_model("F is not square");
  if (m.Q.rows() != m.F.rows() || m.Q.cols() != m.F.cols())
    throw invalid_model("Q shape does not match F");
  check_psd(m.Q, "process noise Q");
  check_probability(m.survival_prob, "survival probability");
}

void validate(const BirthModel& b, Eigen::Index state_dim) {
  for (const auto& e : b.entries) {
    check_probability(e.prob, "birth probability");
    validate(e.density);
    if (e.density.dim() != state_dim)
      throw invalid_model("birth density dimension does not match state");
  }
}

SensorModel position_sensor(const std::vector<int>& axes, int state_axes,
                            const std::vector<double>& noise_std,
                            double detect_prob, double clutter_rate,
                            const std::vector<std::array<double, 2>>& region) {
  if (axes.empty()) throw invalid_model("sensor observes no axis");
  if (noise_std.size() != axes.size() || region.size() != axes.size())
    throw invalid_model("per-axis noise/region lists do not match observed axes");
  SensorModel s;
  const int m = static_cast<int>(axes.size());
  s.H = Eigen::MatrixXd::Zero(m, 2 * state_axes);
  s.R = Eigen::MatrixXd::Zero(m, m);
  for (int r = 0; r < m; ++r) {
    const int a = axes[static_cast<std::size_t>(r)];
    if (a < 0 || a >= state_axes) throw invalid_model("observed axis out of range");
    s.H(r, 2 * a) = 1.0;
    s.R(r, r) = noise_std[static_cast<std::size_t>(r)] * noise_std[static_cast<std::size_t>(r)];
  }
  s.detect_prob = detect_prob;
  s.clutter_rate = clutter_rate;
  s.region = region;
  validate(s, 2 * state_axes);
  return s;
}

void validate(const SensorModel& s, Eigen::Index state_dim) {
  if (s.H.cols() != state_dim) throw invalid_model("H column count does not match state");
  if (s.H.rows() < 1) throw invalid_model("sensor has empty measurement");
  if (s.R.rows() != s.H.rows() || s.R.cols() != s.H.rows())
    throw invalid_model("R shape does not match H");
  check_psd(s.R, "measurement noise R");
  Eigen::LLT<Eigen::MatrixXd> llt(s.R);
  if (llt.info() != Eigen::Success)
    throw invalid_model("measurement noise R is not positive definite");
  check_probability(s.detect_prob, "detection probability");
  if (s.clutter_rate < 0.0) throw invalid_model("clutter rate must be >= 0");
  if (s.region.size() != static_cast<std::size_t>(s.H.rows()))
    throw invalid_model("region bounds do not match measurement dimension");
  for (const auto& b : s.region)
    if (!(b[1] > b[0])) throw invalid_model("region bounds must satisfy lo < hi");
}

void validate(const MultiSensorSuite& suite, Eigen::Index state_dim) {
  if (suite.sensors.empty()) throw invalid_model("sensor suite is empty");
  for (const auto& s : suite.sensors) validate(s, state_dim);
}

Gaussian kalman_predict(const Gaussian& g, const MotionModel& m) {
  if (m.F.cols() != g.dim()) throw invalid_argument("state dimension mismatch");
  Gaussian out;
  out.mean = m.F * g.mean;
  out.cov = m.F * g.cov * m.F.transpose() + m.Q;
  out.cov = ((out.cov + out.cov.transpose()) / 2.0).eval();
  return out;
}

KalmanUpdate kalman_update(const Gaussian& g, const SensorModel& s,
                           const Eigen::VectorXd& z) {
  if (s.H.cols() != g.dim()) throw invalid_argument("state dimension mismatch");
  if (z.size() != s.meas_dim()) throw invalid_argument("measurement dimension mismatch");

  const Eigen::MatrixXd HP = s.H * g.cov;
  Eigen::MatrixXd S = HP * s.H.transpose() + s.R;
  S = ((S + S.transpose()) / 2.0).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw numeric_failure("innovation covariance is not positive definite");

  const Eigen::VectorXd residual = z - s.H * g.mean;
  const Eigen::MatrixXd gain = llt.solve(HP).transpose();  // P H' S^-1

  KalmanUpdate out;
  out.posterior.mean = g.mean + gain * residual;
  const Eigen::MatrixXd joseph =
      Eigen::MatrixXd::Identity(g.dim(), g.dim()) - gain * s.H;
  out.posterior.cov = joseph * g.cov * joseph.transpose() +
                      gain * s.R * gain.transpose();
  out.posterior.cov =
      ((out.posterior.cov + out.posterior.cov.transpose()) / 2.0).eval();

  double log_det = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const double quad = residual.dot(llt.solve(residual));
  out.likelihood = std::exp(
      -0.5 * (quad + static_cast<double>(S.rows()) * kLog2Pi + log_det));
  if (!std::isfinite(out.likelihood))
    throw numeric_failure("measurement likelihood is not finite");
  return out;
}

DetectionFactor detection_factor(const Gaussian& g, const SensorModel& s,
                                 int j, const std::vector<Eigen::VectorXd>& Z) {
  if (j < 0 || j > static_cast<int>(Z.size()))
    throw invalid_argument("measurement index out of range");
  if (j == 0) return {g, 1.0 - s.detect_prob};

  const Eigen::VectorXd& z = Z[static_cast<std::size_t>(j - 1)];
  const double kappa = s.clutter_density(z);
  if (!(kappa > 0.0))
    throw invalid_argument(
        "association factor needs positive clutter density at the measurement "
        "(zero clutter rate or measurement outside the sensor region)");
  KalmanUpdate u = kalman_update(g, s, z);
  return {std::move(u.posterior), u.likelihood * s.detect_prob / kappa};
}

DetectionFactor association_chain(const Gaussian& g,
                                  const MultiSensorSuite& suite,
                                  const std::vector<int>& tuple,
                                  const MultiScan& scan) {
  if (tuple.size() != static_cast<std::size_t>(suite.count()) ||
      scan.by_sensor.size() != static_cast<std::size_t>(suite.count()))
    throw invalid_argument("tuple/scan size does not match sensor count");
  DetectionFactor out{g, 1.0};
  for (int s = 0; s < suite.count(); ++s) {
    DetectionFactor f = detection_factor(
        out.posterior, suite.sensors[static_cast<std::size_t>(s)],
        tuple[static_cast<std::size_t>(s)],
        scan.by_sensor[static_cast<std::size_t>(s)]);
    out.posterior = std::move(f.posterior);
    out.weight *= f.weight;
  }
  return out;
}

}  // namespace glmb
