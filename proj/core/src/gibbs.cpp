#include "glmb/gibbs.hpp"

#include <cmath>
#include <unordered_map>

#include "glmb/random.hpp"

namespace glmb {

void validate(const GibbsConfig& cfg) {
  if (cfg.iterations < 1) throw invalid_argument("need at least one sweep");
  if (!(cfg.temper_exponent > 0.0))
    throw invalid_argument("temper exponent must be positive");
}

AssociationArray initial_association(const AssociationWeightTable& t) {
  AssociationArray a(t.rows(), t.sensor_sizes());
  for (int i = 0; i < t.rows(); ++i)
    if (!t.row(i).is_birth)
      for (int s = 0; s < t.sensors(); ++s) a(i, s) = 0;
  return a;
}

namespace {

/// Per-sensor record of positive measurement indices held by rows other than
/// the one being resampled.
struct ExclusionMasks {
  std::vector<std::vector<char>> taken;  // [s][j], j in 1..M(s)

  void rebuild(const AssociationArray& a, int skip) {
    taken.resize(static_cast<std::size_t>(a.sensors()));
    for (int s = 0; s < a.sensors(); ++s) {
      auto& col = taken[static_cast<std::size_t>(s)];
      col.assign(static_cast<std::size_t>(a.sensor_sizes()[static_cast<std::size_t>(s)]) + 1, 0);
      for (int i = 0; i < a.rows(); ++i) {
        if (i == skip) continue;
        const int v = a(i, s);
        if (v > 0) col[static_cast<std::size_t>(v)] = 1;
      }
    }
  }

  bool excluded(int s, int j) const {
    return j > 0 && taken[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] != 0;
  }
};

double powered(double w, double inv_tau, bool tempered) {
  return tempered ? std::pow(w, inv_tau) : w;
}

/// Exact sum of tempered chained factors over every unexcluded suffix tuple
/// (j_s..j_S), starting from state g before sensor s.
double suffix_sum(const AssociationWeightTable& t, const ExclusionMasks& m,
                  int s, const Gaussian& g, double inv_tau, bool tempered) {
  if (s == t.sensors()) return 1.0;
  const SensorModel& sensor = t.suite()->sensors[static_cast<std::size_t>(s)];
  const auto& Z = t.scan()->by_sensor[static_cast<std::size_t>(s)];
  double total = (1.0 - sensor.detect_prob <= 0.0)
                     ? 0.0
                     : powered(1.0 - sensor.detect_prob, inv_tau, tempered) *
                           suffix_sum(t, m, s + 1, g, inv_tau, tempered);
  for (int j = 1; j <= static_cast<int>(Z.size()); ++j) {
    if (m.excluded(s, j)) continue;
    DetectionFactor f = detection_factor(g, sensor, j, Z);
    if (f.weight <= 0.0) continue;
    total += powered(f.weight, inv_tau, tempered) *
             suffix_sum(t, m, s + 1, f.posterior, inv_tau, tempered);
  }
  return total;
}

void resample_row_dense(const AssociationWeightTable& t, AssociationArray& a,
                        int n, const ExclusionMasks& m, double inv_tau,
                        bool tempered, Rng& rng, std::vector<double>& buf,
                        std::size_t& live_peak) {
  const auto& cells = t.dense_cells(n);
  buf.resize(cells.size());
  live_peak = std::max(live_peak, buf.size());
  buf[0] = powered(cells[0], inv_tau, tempered);
  const auto& sizes = t.sensor_sizes();
  const int S = t.sensors();
  std::vector<int> digits(static_cast<std::size_t>(S), 0);
  for (std::size_t c = 1; c < cells.size(); ++c) {
    bool ok = true;
    for (int s = 0; s < S && ok; ++s)
      ok = !m.excluded(s, digits[static_cast<std::size_t>(s)]);
    buf[c] = ok ? powered(cells[c], inv_tau, tempered) : 0.0;
    for (int s = S - 1; s >= 0; --s) {  // odometer, last sensor fastest
      auto& d = digits[static_cast<std::size_t>(s)];
      if (++d <= sizes[static_cast<std::size_t>(s)]) break;
      d = 0;
    }
  }
  a.set_row_cell(n, static_cast<std::size_t>(rng.categorical(buf)));
}

void resample_row_factorized(const AssociationWeightTable& t,
                             AssociationArray& a, int n,
                             const ExclusionMasks& m, double inv_tau,
                             bool tempered, Rng& rng, std::vector<double>& buf,
                             std::size_t& live_peak) {
  const WeightRow& row = t.row(n);
  const int S = t.sensors();

  // Sensor 1 decides dropped-vs-kept together with its measurement choice.
  const SensorModel& first = t.suite()->sensors[0];
  const auto& Z0 = t.scan()->by_sensor[0];
  buf.assign(Z0.size() + 2, 0.0);
  live_peak = std::max(live_peak, buf.size());
  buf[0] = powered(row.drop_weight, inv_tau, tempered);
  const double keep = powered(row.keep_prob, inv_tau, tempered);
  for (int j = 0; j <= static_cast<int>(Z0.size()); ++j) {
    if (m.excluded(0, j)) continue;
    DetectionFactor f = detection_factor(row.predicted, first, j, Z0);
    if (f.weight <= 0.0) continue;
    buf[static_cast<std::size_t>(j) + 1] =
        keep * powered(f.weight, inv_tau, tempered) *
        suffix_sum(t, m, 1, f.posterior, inv_tau, tempered);
  }
  const int pick = rng.categorical(buf);
  if (pick == 0) {
    a.set_row_cell(n, 0);
    return;
  }
  a(n, 0) = pick - 1;
  Gaussian g = detection_factor(row.predicted, first, pick - 1, Z0).posterior;

  for (int s = 1; s < S; ++s) {
    const SensorModel& sensor = t.suite()->sensors[static_cast<std::size_t>(s)];
    const auto& Z = t.scan()->by_sensor[static_cast<std::size_t>(s)];
    buf.assign(Z.size() + 1, 0.0);
    live_peak = std::max(live_peak, buf.size());
    for (int j = 0; j <= static_cast<int>(Z.size()); ++j) {
      if (m.excluded(s, j)) continue;
      DetectionFactor f = detection_factor(g, sensor, j, Z);
      if (f.weight <= 0.0) continue;
      buf[static_cast<std::size_t>(j)] =
          powered(f.weight, inv_tau, tempered) *
          suffix_sum(t, m, s + 1, f.posterior, inv_tau, tempered);
    }
    const int j = rng.categorical(buf);
    a(n, s) = j;
    g = detection_factor(g, sensor, j, Z).posterior;
  }
}

void resample_row_markov(const AssociationWeightTable& t, AssociationArray& a,
                         int n, const ExclusionMasks& m, double inv_tau,
                         bool tempered, Rng& rng, std::vector<double>& buf,
                         std::size_t& live_peak) {
  const WeightRow& row = t.row(n);
  const int S = t.sensors();
  const auto& sizes = t.sensor_sizes();
  const bool pairwise = t.markov_factors() == MarkovFactors::pairwise;

  auto factor_at = [&](int s, int j_prev, int j) -> double {
    if (m.excluded(s, j)) return 0.0;
    const double f = (pairwise && s > 0) ? t.surrogate_pair_factor(n, s, j_prev, j)
                                         : t.surrogate_factor(n, s, j);
    return f <= 0.0 ? 0.0 : powered(f, inv_tau, tempered);
  };

  // Suffix normalizers. Independent factors need only the running product of
  // per-sensor sums; pairwise factors need a backward recursion per choice.
  // A dropped row has no suffix freedom, so its normalizer is 1.
  std::vector<std::vector<double>> K;
  double tail_after_first = 1.0;
  if (pairwise) {
    K.assign(static_cast<std::size_t>(S), {});
    K[static_cast<std::size_t>(S - 1)].assign(
        static_cast<std::size_t>(sizes[static_cast<std::size_t>(S - 1)]) + 1, 1.0);
    for (int s = S - 2; s >= 0; --s) {
      auto& here = K[static_cast<std::size_t>(s)];
      here.assign(static_cast<std::size_t>(sizes[static_cast<std::size_t>(s)]) + 1, 0.0);
      for (int j = 0; j <= sizes[static_cast<std::size_t>(s)]; ++j) {
        double acc = 0.0;
        for (int jn = 0; jn <= sizes[static_cast<std::size_t>(s + 1)]; ++jn)
          acc += factor_at(s + 1, j, jn) *
                 K[static_cast<std::size_t>(s + 1)][static_cast<std::size_t>(jn)];
        here[static_cast<std::size_t>(j)] = acc;
      }
    }
  } else {
    for (int s = 1; s < S; ++s) {
      double sum = 0.0;
      for (int j = 0; j <= sizes[static_cast<std::size_t>(s)]; ++j)
        sum += factor_at(s, 0, j);
      tail_after_first *= sum;
    }
  }

  buf.assign(static_cast<std::size_t>(sizes[0]) + 2, 0.0);
  live_peak = std::max(live_peak, buf.size());
  buf[0] = powered(row.drop_weight, inv_tau, tempered);
  const double keep = powered(row.keep_prob, inv_tau, tempered);
  for (int j = 0; j <= sizes[0]; ++j) {
    const double tail = pairwise ? K[0][static_cast<std::size_t>(j)] : tail_after_first;
    buf[static_cast<std::size_t>(j) + 1] = keep * factor_at(0, 0, j) * tail;
  }
  const int pick = rng.categorical(buf);
  if (pick == 0) {
    a.set_row_cell(n, 0);
    return;
  }
  a(n, 0) = pick - 1;

  int prev = pick - 1;
  for (int s = 1; s < S; ++s) {
    buf.assign(static_cast<std::size_t>(sizes[static_cast<std::size_t>(s)]) + 1, 0.0);
    live_peak = std::max(live_peak, buf.size());
    for (int j = 0; j <= sizes[static_cast<std::size_t>(s)]; ++j) {
      const double tail = pairwise ? K[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] : 1.0;
      buf[static_cast<std::size_t>(j)] = factor_at(s, prev, j) * tail;
    }
    const int j = rng.categorical(buf);
    a(n, s) = j;
    prev = j;
  }
}

struct ArrayKeyHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (int x : v) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)));
    return static_cast<std::size_t>(h);
  }
};

template <class ResampleRow>
SampleBatch drive(const AssociationWeightTable& t, const AssociationArray& init,
                  const GibbsConfig& cfg, ResampleRow resample) {
  validate(cfg);
  if (init.rows() != t.rows() || init.sensor_sizes() != t.sensor_sizes())
    throw invalid_argument("initial association does not match the table");
  if (!is_positive_one_one(init))
    throw invalid_argument("initial association is not positive 1-1");

  const double inv_tau = 1.0 / cfg.temper_exponent;
  const bool tempered = cfg.temper_exponent != 1.0;

  Rng rng(cfg.rng_seed);
  AssociationArray a = init;
  ExclusionMasks masks;
  std::vector<double> buf;

  SampleBatch batch;
  std::unordered_map<std::vector<int>, std::size_t, ArrayKeyHash> seen;
  auto record = [&](const AssociationArray& state) {
    std::vector<int> key;
    key.reserve(static_cast<std::size_t>(state.rows() * state.sensors()));
    for (int i = 0; i < state.rows(); ++i)
      for (int s = 0; s < state.sensors(); ++s) key.push_back(state(i, s));
    const auto [it, inserted] = seen.emplace(std::move(key), batch.samples.size());
    if (inserted) {
      batch.samples.push_back(state);
      batch.counts.push_back(1);
    } else {
      ++batch.counts[it->second];
    }
  };

  for (int sweep = 0; sweep < cfg.iterations; ++sweep) {
    for (int n = 0; n < t.rows(); ++n) {
      masks.rebuild(a, n);
      resample(t, a, n, masks, inv_tau, tempered, rng, buf,
               batch.max_live_categories);
    }
    record(a);
  }
  return batch;
}

}  // namespace

std::vector<double> conditional_row_dist(const AssociationWeightTable& t, int n,
                                         const AssociationArray& current,
                                         double temper) {
  if (n < 0 || n >= t.rows()) throw invalid_argument("row index out of range");
  if (current.rows() != t.rows() || current.sensor_sizes() != t.sensor_sizes())
    throw invalid_argument("association does not match the table");
  if (!(temper > 0.0)) throw invalid_argument("temper exponent must be positive");

  ExclusionMasks m;
  m.rebuild(current, n);
  const auto& sizes = t.sensor_sizes();
  const int S = t.sensors();
  std::vector<double> w(t.cell_count(), 0.0);

  if (t.mode() == SamplerMode::dense) {
    const auto& cells = t.dense_cells(n);
    w[0] = cells[0];
    std::vector<int> digits(static_cast<std::size_t>(S), 0);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      bool ok = true;
      for (int s = 0; s < S && ok; ++s)
        ok = !m.excluded(s, digits[static_cast<std::size_t>(s)]);
      w[c] = ok ? cells[c] : 0.0;
      for (int s = S - 1; s >= 0; --s) {
        auto& d = digits[static_cast<std::size_t>(s)];
        if (++d <= sizes[static_cast<std::size_t>(s)]) break;
        d = 0;
      }
    }
  } else if (t.mode() == SamplerMode::factorized) {
    w[0] = t.row(n).drop_weight;
    std::size_t c = 1;
    auto walk = [&](auto&& self, int s, const Gaussian& g, double acc) -> void {
      if (s == S) {
        w[c++] = t.row(n).keep_prob * acc;
        return;
      }
      const SensorModel& sensor = t.suite()->sensors[static_cast<std::size_t>(s)];
      const auto& Z = t.scan()->by_sensor[static_cast<std::size_t>(s)];
      const std::size_t skip_block = [&] {
        std::size_t b = 1;
        for (int u = s + 1; u < S; ++u)
          b *= static_cast<std::size_t>(sizes[static_cast<std::size_t>(u)]) + 1;
        return b;
      }();
      for (int j = 0; j <= static_cast<int>(Z.size()); ++j) {
        if (m.excluded(s, j)) {
          c += skip_block;  // whole subtree conflicts
          continue;
        }
        DetectionFactor f = detection_factor(g, sensor, j, Z);
        if (f.weight <= 0.0) {
          c += skip_block;
          continue;
        }
        self(self, s + 1, f.posterior, acc * f.weight);
      }
    };
    walk(walk, 0, t.row(n).predicted, 1.0);
  } else {
    w[0] = t.row(n).drop_weight;
    std::vector<int> digits(static_cast<std::size_t>(S), 0);
    for (std::size_t c = 1; c < w.size(); ++c) {
      bool ok = true;
      for (int s = 0; s < S && ok; ++s)
        ok = !m.excluded(s, digits[static_cast<std::size_t>(s)]);
      if (ok) {
        std::vector<int> tuple(digits.begin(), digits.end());
        w[c] = t.surrogate_row_weight(n, tuple);
      }
      for (int s = S - 1; s >= 0; --s) {
        auto& d = digits[static_cast<std::size_t>(s)];
        if (++d <= sizes[static_cast<std::size_t>(s)]) break;
        d = 0;
      }
    }
  }

  double total = 0.0;
  if (temper != 1.0) {
    const double inv_tau = 1.0 / temper;
    for (auto& x : w) x = x > 0.0 ? std::pow(x, inv_tau) : 0.0;
  }
  for (double x : w) total += x;
  if (!(total > 0.0) || !std::isfinite(total))
    throw internal_error("conditional has no positive mass");
  for (auto& x : w) x /= total;
  return w;
}

SampleBatch gibbs_dense(const AssociationWeightTable& t,
                        const AssociationArray& init, const GibbsConfig& cfg) {
  if (t.mode() != SamplerMode::dense)
    throw invalid_state("table was not built in dense mode");
  return drive(t, init, cfg, resample_row_dense);
}

SampleBatch gibbs_factorized(const AssociationWeightTable& t,
                             const AssociationArray& init,
                             const GibbsConfig& cfg) {
  if (t.mode() != SamplerMode::factorized)
    throw invalid_state("table was not built in factorized mode");
  if (t.suite() == nullptr)
    throw invalid_state("factorized sampling needs a model-built table");
  return drive(t, init, cfg, resample_row_factorized);
}

SampleBatch gibbs_markov(const AssociationWeightTable& t,
                         const AssociationArray& init, const GibbsConfig& cfg) {
  if (t.mode() != SamplerMode::markov)
    throw invalid_state("table was not built in markov mode");
  return drive(t, init, cfg, resample_row_markov);
}

SampleBatch run_gibbs(const AssociationWeightTable& t,
                      const AssociationArray& init, const GibbsConfig& cfg) {
  switch (cfg.mode) {
    case SamplerMode::dense: return gibbs_dense(t, init, cfg);
    case SamplerMode::factorized: return gibbs_factorized(t, init, cfg);
    case SamplerMode::markov: return gibbs_markov(t, init, cfg);
  }
  throw internal_error("unknown sampler mode");
}

}  // namespace glmb
