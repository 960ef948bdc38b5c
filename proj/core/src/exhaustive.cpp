#include "glmb/exhaustive.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "glmb/kalman.hpp"

namespace glmb {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_size_guard(int rows, const std::vector<int>& sensor_sizes) {
  double per_row = 1.0;
  for (int m : sensor_sizes) per_row *= static_cast<double>(m) + 2.0;
  if (std::pow(per_row, static_cast<double>(rows)) > 1e7)
    throw too_large("enumeration space exceeds the 1e7 guard");
}

}  // namespace

std::vector<AssociationArray> enumerate_assignments(
    int rows, const std::vector<int>& sensor_sizes) {
  if (rows < 0) throw invalid_argument("negative row count");
  if (sensor_sizes.empty()) throw invalid_argument("need at least one sensor");
  check_size_guard(rows, sensor_sizes);

  std::vector<AssociationArray> out;
  AssociationArray a(rows, sensor_sizes);
  if (rows == 0) {
    out.push_back(a);
    return out;
  }
  const std::size_t cells = a.cell_count();
  std::vector<std::vector<char>> taken(sensor_sizes.size());
  for (std::size_t s = 0; s < sensor_sizes.size(); ++s)
    taken[s].assign(static_cast<std::size_t>(sensor_sizes[s]) + 1, 0);

  auto rec = [&](auto&& self, int i) -> void {
    if (i == rows) {
      out.push_back(a);
      return;
    }
    for (std::size_t c = 0; c < cells; ++c) {
      a.set_row_cell(i, c);
      bool ok = true;
      for (int s = 0; s < a.sensors() && ok; ++s) {
        const int v = a(i, s);
        if (v > 0 && taken[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)])
          ok = false;
      }
      if (!ok) continue;
      for (int s = 0; s < a.sensors(); ++s) {
        const int v = a(i, s);
        if (v > 0) taken[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)] = 1;
      }
      self(self, i + 1);
      for (int s = 0; s < a.sensors(); ++s) {
        const int v = a(i, s);
        if (v > 0) taken[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)] = 0;
      }
    }
    a.set_row_cell(i, 0);
  };
  rec(rec, 0);
  return out;
}

double EnumeratedTarget::probability_of(const AssociationArray& a) const {
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] == a) return probability[i];
  return 0.0;
}

EnumeratedTarget exact_target(const AssociationWeightTable& t, double temper,
                              bool surrogate) {
  if (!(temper > 0.0)) throw invalid_argument("temper exponent must be positive");
  EnumeratedTarget target;
  target.support = enumerate_assignments(t.rows(), t.sensor_sizes());

  std::vector<long double> raw;
  raw.reserve(target.support.size());
  long double total = 0.0L;
  std::vector<int> tuple(static_cast<std::size_t>(t.sensors()));
  for (const AssociationArray& a : target.support) {
    long double w = 1.0L;
    for (int i = 0; i < t.rows(); ++i) {
      if (!a.row_kept(i)) {
        w *= static_cast<long double>(t.row(i).drop_weight);
        continue;
      }
      for (int s = 0; s < t.sensors(); ++s)
        tuple[static_cast<std::size_t>(s)] = a(i, s);
      w *= static_cast<long double>(surrogate ? t.surrogate_row_weight(i, tuple)
                                              : t.row_weight(i, tuple));
    }
    if (temper != 1.0) w = powl(w, static_cast<long double>(1.0 / temper));
    raw.push_back(w);
    total += w;
  }
  if (!(total > 0.0L)) throw numeric_failure("target has no positive mass");
  target.probability.reserve(raw.size());
  for (long double w : raw)
    target.probability.push_back(static_cast<double>(w / total));
  return target;
}

DetectionFactor stacked_association(const Gaussian& g,
                                    const MultiSensorSuite& suite,
                                    const std::vector<int>& tuple,
                                    const MultiScan& scan) {
  if (tuple.size() != static_cast<std::size_t>(suite.count()) ||
      scan.by_sensor.size() != static_cast<std::size_t>(suite.count()))
    throw invalid_argument("tuple/scan size does not match sensor count");

  double weight = 1.0;
  Eigen::Index stacked_dim = 0;
  for (int s = 0; s < suite.count(); ++s) {
    const SensorModel& sensor = suite.sensors[static_cast<std::size_t>(s)];
    const int j = tuple[static_cast<std::size_t>(s)];
    if (j < 0 ||
        j > static_cast<int>(scan.by_sensor[static_cast<std::size_t>(s)].size()))
      throw invalid_argument("measurement index out of range");
    if (j == 0) {
      weight *= 1.0 - sensor.detect_prob;
    } else {
      const Eigen::VectorXd& z =
          scan.by_sensor[static_cast<std::size_t>(s)][static_cast<std::size_t>(j - 1)];
      const double kappa = sensor.clutter_density(z);
      if (!(kappa > 0.0))
        throw invalid_argument("measurement outside the sensor region");
      weight *= sensor.detect_prob / kappa;
      stacked_dim += sensor.meas_dim();
    }
  }
  if (stacked_dim == 0) return {g, weight};

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(stacked_dim, g.dim());
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(stacked_dim, stacked_dim);
  Eigen::VectorXd z(stacked_dim);
  Eigen::Index at = 0;
  for (int s = 0; s < suite.count(); ++s) {
    const int j = tuple[static_cast<std::size_t>(s)];
    if (j == 0) continue;
    const SensorModel& sensor = suite.sensors[static_cast<std::size_t>(s)];
    const Eigen::Index m = sensor.meas_dim();
    H.middleRows(at, m) = sensor.H;
    R.block(at, at, m, m) = sensor.R;
    z.segment(at, m) =
        scan.by_sensor[static_cast<std::size_t>(s)][static_cast<std::size_t>(j - 1)];
    at += m;
  }

  const Eigen::MatrixXd S = H * g.cov * H.transpose() + R;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success)
    throw numeric_failure("stacked innovation covariance is not decomposable");
  const Eigen::VectorXd r = z - H * g.mean;
  const double log_det = ldlt.vectorD().array().log().sum();
  const double q = std::exp(
      -0.5 * (r.dot(ldlt.solve(r)) + static_cast<double>(stacked_dim) * kLog2Pi +
              log_det));

  const Eigen::MatrixXd K = g.cov * H.transpose() * ldlt.solve(
      Eigen::MatrixXd::Identity(stacked_dim, stacked_dim));
  DetectionFactor out;
  out.posterior.mean = g.mean + K * r;
  out.posterior.cov = g.cov - K * S * K.transpose();
  out.posterior.cov =
      ((out.posterior.cov + out.posterior.cov.transpose()) / 2.0).eval();
  out.weight = weight * q;
  return out;
}

GlmbDensity exact_update(const GlmbDensity& prior, const MotionModel& motion,
                         const BirthModel& birth, const MultiSensorSuite& suite,
                         const MultiScan& scan, double prune_threshold) {
  if (prior.components.empty())
    throw invalid_state("prior density has no components");
  check_component_structure(prior);

  const int birth_time = prior.time + 1;
  const auto sizes = scan.sizes();

  struct Candidate {
    std::vector<Label> labels;
    std::vector<Gaussian> tracks;
    std::uint64_t lineage = 0;
    long double weight = 0.0L;
  };
  std::map<std::pair<std::vector<Label>, std::uint64_t>, Candidate> merged;

  for (const GlmbComponent& parent : prior.components) {
    const long double parent_w =
        expl(static_cast<long double>(parent.log_weight));

    std::vector<Label> labels;
    std::vector<Gaussian> predicted;
    std::vector<double> keep;
    for (std::size_t i = 0; i < parent.labels.size(); ++i) {
      labels.push_back(parent.labels[i]);
      predicted.push_back(kalman_predict(parent.tracks[i], motion));
      keep.push_back(motion.survival_prob);
    }
    for (std::size_t i = 0; i < birth.entries.size(); ++i) {
      labels.push_back(Label{birth_time, static_cast<std::int32_t>(i)});
      predicted.push_back(birth.entries[i].density);
      keep.push_back(birth.entries[i].prob);
    }
    const int P = static_cast<int>(labels.size());

    std::vector<int> tuple(static_cast<std::size_t>(suite.count()));
    for (const AssociationArray& a : enumerate_assignments(P, sizes)) {
      long double w = parent_w;
      Candidate cand;
      for (int i = 0; i < P; ++i) {
        if (!a.row_kept(i)) {
          w *= static_cast<long double>(1.0 - keep[static_cast<std::size_t>(i)]);
          continue;
        }
        for (int s = 0; s < suite.count(); ++s)
          tuple[static_cast<std::size_t>(s)] = a(i, s);
        DetectionFactor f = stacked_association(
            predicted[static_cast<std::size_t>(i)], suite, tuple, scan);
        w *= static_cast<long double>(keep[static_cast<std::size_t>(i)]) *
             static_cast<long double>(f.weight);
        cand.labels.push_back(labels[static_cast<std::size_t>(i)]);
        cand.tracks.push_back(std::move(f.posterior));
      }
      cand.lineage = chain_lineage(parent.lineage, convert(a, labels));
      cand.weight = w;

      auto key = std::make_pair(cand.labels, cand.lineage);
      auto it = merged.find(key);
      if (it == merged.end())
        merged.emplace(std::move(key), std::move(cand));
      else
        it->second.weight += w;  // same lineage, same densities
    }
  }

  long double total = 0.0L;
  for (const auto& [key, cand] : merged) total += cand.weight;
  if (!(total > 0.0L)) throw numeric_failure("posterior has no positive mass");

  GlmbDensity out;
  out.time = prior.time + 1;
  long double kept_total = 0.0L;
  for (const auto& [key, cand] : merged) {
    const long double normalized = cand.weight / total;
    if (static_cast<double>(normalized) < prune_threshold) continue;
    kept_total += cand.weight;
  }
  if (!(kept_total > 0.0L)) throw numeric_failure("pruning removed all mass");
  for (auto& [key, cand] : merged) {
    const long double normalized = cand.weight / total;
    if (static_cast<double>(normalized) < prune_threshold) continue;
    GlmbComponent c;
    c.labels = cand.labels;
    c.tracks = std::move(cand.tracks);
    c.lineage = cand.lineage;
    c.log_weight = static_cast<double>(logl(cand.weight / kept_total));
    out.components.push_back(std::move(c));
  }
  std::stable_sort(out.components.begin(), out.components.end(),
                   [](const GlmbComponent& x, const GlmbComponent& y) {
                     return x.log_weight > y.log_weight;
                   });
  return out;
}

}  // namespace glmb
