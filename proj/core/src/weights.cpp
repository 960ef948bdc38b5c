#include "glmb/weights.hpp"

#include <algorithm>
#include <cmath>

namespace glmb {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

/// Single-sensor update of one fixed prior, factored so that evaluating many
/// measurements shares the innovation Cholesky, gain and posterior covariance.
class FactoredUpdate {
 public:
  FactoredUpdate(const Gaussian& g, const SensorModel& s) : prior_mean_(g.mean) {
    const Eigen::MatrixXd HP = s.H * g.cov;
    Eigen::MatrixXd S = HP * s.H.transpose() + s.R;
    S = ((S + S.transpose()) / 2.0).eval();
    llt_.compute(S);
    if (llt_.info() != Eigen::Success)
      throw numeric_failure("innovation covariance is not positive definite");
    H_ = s.H;
    predicted_meas_ = s.H * g.mean;
    gain_ = llt_.solve(HP).transpose();
    const Eigen::MatrixXd joseph =
        Eigen::MatrixXd::Identity(g.dim(), g.dim()) - gain_ * s.H;
    posterior_cov_ = joseph * g.cov * joseph.transpose() +
                     gain_ * s.R * gain_.transpose();
    posterior_cov_ = ((posterior_cov_ + posterior_cov_.transpose()) / 2.0).eval();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i)
      log_det += 2.0 * std::log(llt_.matrixL()(i, i));
    log_norm_ = -0.5 * (static_cast<double>(S.rows()) * kLog2Pi + log_det);
  }

  double likelihood(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd r = z - predicted_meas_;
    return std::exp(log_norm_ - 0.5 * r.dot(llt_.solve(r)));
  }

  Gaussian posterior(const Eigen::VectorXd& z) const {
    return {prior_mean_ + gain_ * (z - predicted_meas_), posterior_cov_};
  }

 private:
  Eigen::VectorXd prior_mean_;
  Eigen::VectorXd predicted_meas_;
  Eigen::MatrixXd H_;
  Eigen::MatrixXd gain_;
  Eigen::MatrixXd posterior_cov_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_norm_ = 0.0;
};

double sensor_factor(const FactoredUpdate& u, const SensorModel& s, int j,
                     const std::vector<Eigen::VectorXd>& Z) {
  if (j == 0) return 1.0 - s.detect_prob;
  const Eigen::VectorXd& z = Z[static_cast<std::size_t>(j - 1)];
  const double kappa = s.clutter_density(z);
  if (!(kappa > 0.0))
    throw invalid_argument("measurement outside the sensor region");
  return u.likelihood(z) * s.detect_prob / kappa;
}

}  // namespace

std::string to_string(SamplerMode m) {
  switch (m) {
    case SamplerMode::dense: return "dense";
    case SamplerMode::factorized: return "factorized";
    case SamplerMode::markov: return "markov";
  }
  throw internal_error("unknown sampler mode");
}

SamplerMode sampler_mode_from_string(const std::string& name) {
  if (name == "dense") return SamplerMode::dense;
  if (name == "factorized") return SamplerMode::factorized;
  if (name == "markov") return SamplerMode::markov;
  throw invalid_argument("unknown sampler mode '" + name + "'");
}

std::string to_string(MarkovFactors f) {
  switch (f) {
    case MarkovFactors::independent: return "independent";
    case MarkovFactors::pairwise: return "pairwise";
  }
  throw internal_error("unknown factor choice");
}

MarkovFactors markov_factors_from_string(const std::string& name) {
  if (name == "independent") return MarkovFactors::independent;
  if (name == "pairwise") return MarkovFactors::pairwise;
  throw invalid_argument("unknown factor choice '" + name + "'");
}

std::size_t AssociationWeightTable::cell_count() const {
  std::size_t n = 1;
  for (int m : sensor_sizes_) n *= static_cast<std::size_t>(m) + 1;
  return n + 1;
}

std::vector<Label> AssociationWeightTable::labels() const {
  std::vector<Label> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.label);
  return out;
}

AssociationWeightTable AssociationWeightTable::build(
    const GlmbComponent& parent, const MotionModel& motion,
    const BirthModel& birth, int birth_time, const MultiSensorSuite& suite,
    const MultiScan& scan, SamplerMode mode, MarkovFactors factors) {
  if (parent.labels.size() != parent.tracks.size())
    throw invalid_argument("parent labels and tracks are misaligned");
  if (!std::is_sorted(parent.labels.begin(), parent.labels.end()))
    throw invalid_argument("parent labels are not sorted");
  if (scan.by_sensor.size() != static_cast<std::size_t>(suite.count()))
    throw invalid_argument("scan does not match sensor count");

  AssociationWeightTable t;
  t.mode_ = mode;
  t.markov_factors_ = factors;
  t.suite_ = &suite;
  t.scan_ = &scan;
  for (int m : scan.sizes()) t.sensor_sizes_.push_back(m);

  // Survivor rows first (labels already sorted), then birth rows; birth
  // labels are newer than every survivor, so the row order is label order.
  for (std::size_t i = 0; i < parent.labels.size(); ++i) {
    WeightRow r;
    r.label = parent.labels[i];
    r.predicted = kalman_predict(parent.tracks[i], motion);
    r.keep_prob = motion.survival_prob;
    r.drop_weight = 1.0 - motion.survival_prob;
    r.is_birth = false;
    t.rows_.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < birth.entries.size(); ++i) {
    WeightRow r;
    r.label = Label{birth_time, static_cast<std::int32_t>(i)};
    r.predicted = birth.entries[i].density;
    r.keep_prob = birth.entries[i].prob;
    r.drop_weight = 1.0 - birth.entries[i].prob;
    r.is_birth = true;
    t.rows_.push_back(std::move(r));
  }

  const int S = t.sensors();
  if (mode == SamplerMode::dense) {
    t.dense_.resize(t.rows_.size());
    for (int i = 0; i < t.rows(); ++i) {
      auto& cells = t.dense_[static_cast<std::size_t>(i)];
      cells.reserve(t.cell_count());
      cells.push_back(t.rows_[static_cast<std::size_t>(i)].drop_weight);
      // Depth-first over sensors, measurement index ascending, emits kept
      // tuples exactly in mixed-radix order.
      auto walk = [&](auto&& self, int s, const Gaussian& g, double acc) -> void {
        if (s == S) {
          cells.push_back(t.rows_[static_cast<std::size_t>(i)].keep_prob * acc);
          return;
        }
        const SensorModel& sensor = suite.sensors[static_cast<std::size_t>(s)];
        const auto& Z = scan.by_sensor[static_cast<std::size_t>(s)];
        self(self, s + 1, g, acc * (1.0 - sensor.detect_prob));
        if (Z.empty()) return;
        FactoredUpdate u(g, sensor);
        for (int j = 1; j <= static_cast<int>(Z.size()); ++j) {
          const double f = sensor_factor(u, sensor, j, Z);
          self(self, s + 1, u.posterior(Z[static_cast<std::size_t>(j - 1)]),
               acc * f);
        }
      };
      walk(walk, 0, t.rows_[static_cast<std::size_t>(i)].predicted, 1.0);
    }
  } else if (mode == SamplerMode::markov) {
    t.factor_.resize(t.rows_.size());
    if (factors == MarkovFactors::pairwise) t.pair_.resize(t.rows_.size());
    for (int i = 0; i < t.rows(); ++i) {
      const Gaussian& predicted = t.rows_[static_cast<std::size_t>(i)].predicted;
      auto& per_sensor = t.factor_[static_cast<std::size_t>(i)];
      per_sensor.resize(static_cast<std::size_t>(S));
      for (int s = 0; s < S; ++s) {
        const SensorModel& sensor = suite.sensors[static_cast<std::size_t>(s)];
        const auto& Z = scan.by_sensor[static_cast<std::size_t>(s)];
        auto& f = per_sensor[static_cast<std::size_t>(s)];
        f.resize(Z.size() + 1);
        f[0] = 1.0 - sensor.detect_prob;
        if (Z.empty()) continue;
        FactoredUpdate u(predicted, sensor);
        for (int j = 1; j <= static_cast<int>(Z.size()); ++j)
          f[static_cast<std::size_t>(j)] = sensor_factor(u, sensor, j, Z);
      }
      if (factors == MarkovFactors::pairwise) {
        auto& pairs = t.pair_[static_cast<std::size_t>(i)];
        pairs.resize(static_cast<std::size_t>(S));
        for (int s = 1; s < S; ++s) {
          const SensorModel& prev = suite.sensors[static_cast<std::size_t>(s - 1)];
          const auto& Zprev = scan.by_sensor[static_cast<std::size_t>(s - 1)];
          const SensorModel& sensor = suite.sensors[static_cast<std::size_t>(s)];
          const auto& Z = scan.by_sensor[static_cast<std::size_t>(s)];
          auto& table = pairs[static_cast<std::size_t>(s)];
          table.resize((Zprev.size() + 1) * (Z.size() + 1));
          FactoredUpdate through_prev(predicted, prev);
          for (int jp = 0; jp <= static_cast<int>(Zprev.size()); ++jp) {
            const Gaussian g =
                jp == 0 ? predicted
                        : through_prev.posterior(
                              Zprev[static_cast<std::size_t>(jp - 1)]);
            FactoredUpdate u(g, sensor);
            for (int j = 0; j <= static_cast<int>(Z.size()); ++j)
              table[static_cast<std::size_t>(jp) * (Z.size() + 1) +
                    static_cast<std::size_t>(j)] = sensor_factor(u, sensor, j, Z);
          }
        }
      }
    }
  }
  return t;
}

AssociationWeightTable AssociationWeightTable::from_dense(
    std::vector<int> sensor_sizes, std::vector<std::vector<double>> cells) {
  AssociationWeightTable t;
  t.mode_ = SamplerMode::dense;
  t.sensor_sizes_ = std::move(sensor_sizes);
  if (t.sensor_sizes_.empty()) throw invalid_argument("need at least one sensor");
  for (int m : t.sensor_sizes_)
    if (m < 0) throw invalid_argument("negative measurement count");
  const std::size_t want = t.cell_count();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].size() != want)
      throw invalid_argument("row " + std::to_string(i) + " has " +
                             std::to_string(cells[i].size()) + " cells, expected " +
                             std::to_string(want));
    for (double w : cells[i])
      if (!(w > 0.0) || !std::isfinite(w))
        throw invalid_argument("cell weights must be positive and finite");
    WeightRow r;
    r.label = Label{0, static_cast<std::int32_t>(i)};
    r.keep_prob = 1.0;
    r.drop_weight = cells[i][0];
    t.rows_.push_back(std::move(r));
  }
  t.dense_ = std::move(cells);
  return t;
}

namespace {

std::size_t tuple_cell(const std::vector<int>& sizes, const std::vector<int>& tuple) {
  std::size_t c = 0;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const int j = tuple[s];
    if (j < 0 || j > sizes[s]) throw invalid_argument("tuple entry out of range");
    c = c * (static_cast<std::size_t>(sizes[s]) + 1) + static_cast<std::size_t>(j);
  }
  return c + 1;
}

}  // namespace

double AssociationWeightTable::row_weight(int i, const std::vector<int>& tuple) const {
  if (tuple.size() != sensor_sizes_.size())
    throw invalid_argument("tuple size does not match sensor count");
  if (suite_ == nullptr)
    return dense_[static_cast<std::size_t>(i)][tuple_cell(sensor_sizes_, tuple)];
  const WeightRow& r = rows_[static_cast<std::size_t>(i)];
  const DetectionFactor f = association_chain(r.predicted, *suite_, tuple, *scan_);
  return r.keep_prob * f.weight;
}

double AssociationWeightTable::log_row_weight(int i, const std::vector<int>& tuple) const {
  if (tuple.size() != sensor_sizes_.size())
    throw invalid_argument("tuple size does not match sensor count");
  if (suite_ == nullptr)
    return std::log(dense_[static_cast<std::size_t>(i)][tuple_cell(sensor_sizes_, tuple)]);
  const WeightRow& r = rows_[static_cast<std::size_t>(i)];
  double acc = std::log(r.keep_prob);
  Gaussian g = r.predicted;
  for (int s = 0; s < sensors(); ++s) {
    DetectionFactor f =
        detection_factor(g, suite_->sensors[static_cast<std::size_t>(s)],
                         tuple[static_cast<std::size_t>(s)],
                         scan_->by_sensor[static_cast<std::size_t>(s)]);
    acc += std::log(f.weight);
    g = std::move(f.posterior);
  }
  return acc;
}

double AssociationWeightTable::surrogate_row_weight(int i,
                                                    const std::vector<int>& tuple) const {
  if (mode_ != SamplerMode::markov)
    throw invalid_state("surrogate weights exist only in markov mode");
  const WeightRow& r = rows_[static_cast<std::size_t>(i)];
  double w = r.keep_prob;
  if (markov_factors_ == MarkovFactors::independent) {
    for (int s = 0; s < sensors(); ++s)
      w *= surrogate_factor(i, s, tuple[static_cast<std::size_t>(s)]);
  } else {
    w *= surrogate_factor(i, 0, tuple[0]);
    for (int s = 1; s < sensors(); ++s)
      w *= surrogate_pair_factor(i, s, tuple[static_cast<std::size_t>(s - 1)],
                                 tuple[static_cast<std::size_t>(s)]);
  }
  return w;
}

const std::vector<double>& AssociationWeightTable::dense_cells(int i) const {
  if (mode_ != SamplerMode::dense)
    throw invalid_state("dense cells exist only in dense mode");
  return dense_[static_cast<std::size_t>(i)];
}

double AssociationWeightTable::surrogate_factor(int i, int s, int j) const {
  if (mode_ != SamplerMode::markov)
    throw invalid_state("surrogate factors exist only in markov mode");
  return factor_[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)]
                [static_cast<std::size_t>(j)];
}

double AssociationWeightTable::surrogate_pair_factor(int i, int s, int j_prev,
                                                     int j) const {
  if (mode_ != SamplerMode::markov || markov_factors_ != MarkovFactors::pairwise)
    throw invalid_state("pairwise factors exist only in pairwise markov mode");
  const std::size_t width = static_cast<std::size_t>(sensor_sizes_[static_cast<std::size_t>(s)]) + 1;
  return pair_[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)]
              [static_cast<std::size_t>(j_prev) * width + static_cast<std::size_t>(j)];
}

}  // namespace glmb
