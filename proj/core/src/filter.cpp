#include "glmb/filter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include "glmb/exhaustive.hpp"
#include "glmb/kalman.hpp"
#include "glmb/random.hpp"

namespace glmb {

std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::map_cardinality: return "map_cardinality";
    case EstimatorKind::existence_threshold: return "existence_threshold";
  }
  throw internal_error("unknown estimator kind");
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
  if (name == "map_cardinality") return EstimatorKind::map_cardinality;
  if (name == "existence_threshold") return EstimatorKind::existence_threshold;
  throw invalid_argument("unknown estimator '" + name + "'");
}

std::string to_string(Truncation t) {
  switch (t) {
    case Truncation::gibbs: return "gibbs";
    case Truncation::exhaustive: return "exhaustive";
  }
  throw internal_error("unknown truncation");
}

Truncation truncation_from_string(const std::string& name) {
  if (name == "gibbs") return Truncation::gibbs;
  if (name == "exhaustive") return Truncation::exhaustive;
  throw invalid_argument("unknown truncation '" + name + "'");
}

void validate(const FilterConfig& cfg) {
  if (cfg.sample_budget < 1) throw invalid_argument("sample budget must be >= 1");
  if (cfg.prune_threshold < 0.0 || cfg.prune_threshold >= 1.0)
    throw invalid_argument("prune threshold must lie in [0, 1)");
  if (!(cfg.existence_threshold > 0.0) || !(cfg.existence_threshold < 1.0))
    throw invalid_argument("existence threshold must lie in (0, 1)");
  if (!(cfg.gibbs.temper_exponent > 0.0))
    throw invalid_argument("temper exponent must be positive");
}

namespace {

int worker_count(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("GLMB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<std::size_t>(n, jobs == 0 ? 1 : jobs));
}

/// Multinomial counts over components by repeated CDF inversion; one uniform
/// per trial, drawn from the shared update-level stream.
std::vector<int> multinomial_counts(Rng& rng, const std::vector<double>& weights,
                                    int trials) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw numeric_failure("prior weights sum to zero");
  std::vector<int> counts(weights.size(), 0);
  for (int t = 0; t < trials; ++t) {
    const double u = rng.uniform01() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx =
        std::min(static_cast<std::size_t>(it - cdf.begin()), weights.size() - 1);
    ++counts[idx];
  }
  return counts;
}

struct Candidate {
  std::vector<Label> labels;
  std::vector<Gaussian> tracks;
  double log_weight = 0.0;
  std::uint64_t lineage = 0;
};

/// Expands every distinct association of one parent component into posterior
/// candidates with exact weights.
std::vector<Candidate> expand_component(
    const GlmbComponent& parent, const MotionModel& motion,
    const BirthModel& birth, const MultiSensorSuite& suite,
    const MultiScan& scan, const FilterConfig& cfg, int birth_time,
    std::uint64_t chain_seed, int sweeps) {
  const AssociationWeightTable table =
      AssociationWeightTable::build(parent, motion, birth, birth_time, suite,
                                    scan, cfg.gibbs.mode, cfg.gibbs.markov_factors);

  std::vector<AssociationArray> picks;
  if (cfg.truncation == Truncation::exhaustive) {
    picks = enumerate_assignments(table.rows(), table.sensor_sizes());
  } else {
    GibbsConfig gc = cfg.gibbs;
    gc.iterations = sweeps;
    gc.rng_seed = chain_seed;
    SampleBatch batch = run_gibbs(table, initial_association(table), gc);
    picks = std::move(batch.samples);
  }

  const std::vector<Label> labels = table.labels();
  std::vector<Candidate> out;
  out.reserve(picks.size());
  std::vector<int> tuple(static_cast<std::size_t>(table.sensors()));
  for (const AssociationArray& a : picks) {
    Candidate cand;
    cand.log_weight = parent.log_weight;
    for (int i = 0; i < table.rows(); ++i) {
      if (!a.row_kept(i)) {
        cand.log_weight += std::log(table.row(i).drop_weight);
        continue;
      }
      for (int s = 0; s < table.sensors(); ++s)
        tuple[static_cast<std::size_t>(s)] = a(i, s);
      cand.log_weight += table.log_row_weight(i, tuple);
      cand.labels.push_back(labels[static_cast<std::size_t>(i)]);
      cand.tracks.push_back(
          association_chain(table.row(i).predicted, suite, tuple, scan).posterior);
    }
    if (std::isnan(cand.log_weight))
      throw numeric_failure("posterior weight is not a number");
    cand.lineage = chain_lineage(parent.lineage, convert(a, labels));
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace

GlmbDensity joint_update(const GlmbDensity& prior, const MotionModel& motion,
                         const BirthModel& birth, const MultiSensorSuite& suite,
                         const MultiScan& scan, const FilterConfig& cfg,
                         UpdateStats* stats) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(cfg);
  if (prior.components.empty())
    throw invalid_state("prior density has no components");
  check_component_structure(prior);
  validate(motion);
  const Eigen::Index dim = motion.F.rows();
  validate(birth, dim);
  validate(suite, dim);
  if (scan.by_sensor.size() != static_cast<std::size_t>(suite.count()))
    throw invalid_argument("scan does not match sensor count");

  const int birth_time = prior.time + 1;
  const std::uint64_t base = mix64(cfg.gibbs.rng_seed,
                                   static_cast<std::uint64_t>(
                                       static_cast<std::uint32_t>(prior.time)));

  // Sweep allocation. Exhaustive truncation expands every component fully.
  std::vector<int> sweeps(prior.components.size(), 0);
  if (cfg.truncation == Truncation::exhaustive) {
    std::fill(sweeps.begin(), sweeps.end(), 1);
  } else {
    std::vector<double> lw;
    lw.reserve(prior.components.size());
    for (const auto& c : prior.components) lw.push_back(c.log_weight);
    const double shift = *std::max_element(lw.begin(), lw.end());
    std::vector<double> w;
    w.reserve(lw.size());
    for (double x : lw) w.push_back(std::exp(x - shift));
    Rng alloc_rng(mix64(base, 0));
    sweeps = multinomial_counts(alloc_rng, w, cfg.sample_budget);
  }

  std::vector<std::size_t> active;
  for (std::size_t h = 0; h < sweeps.size(); ++h)
    if (sweeps[h] > 0) active.push_back(h);

  // One independent chain per active component; deterministic seeds, so the
  // result does not depend on the thread schedule.
  std::vector<std::vector<Candidate>> slots(active.size());
  const int workers = worker_count(active.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](int w) {
    for (std::size_t k = static_cast<std::size_t>(w); k < active.size();
         k += static_cast<std::size_t>(workers)) {
      try {
        const std::size_t h = active[k];
        slots[k] = expand_component(prior.components[h], motion, birth, suite,
                                    scan, cfg, birth_time, mix64(base, 1 + h),
                                    sweeps[h]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Merge by (labels, lineage): same history implies identical densities, so
  // weights add and the first-seen tracks stand for all.
  std::map<std::pair<std::vector<Label>, std::uint64_t>, std::size_t> index;
  std::vector<GlmbComponent> components;
  std::vector<std::vector<double>> weight_terms;
  int unique_samples = 0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    unique_samples += static_cast<int>(slots[k].size());
    for (Candidate& cand : slots[k]) {
      auto key = std::make_pair(cand.labels, cand.lineage);
      const auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(std::move(key), components.size());
        GlmbComponent c;
        c.labels = std::move(cand.labels);
        c.tracks = std::move(cand.tracks);
        c.lineage = cand.lineage;
        components.push_back(std::move(c));
        weight_terms.push_back({cand.log_weight});
      } else {
        weight_terms[it->second].push_back(cand.log_weight);
      }
    }
  }
  for (std::size_t i = 0; i < components.size(); ++i)
    components[i].log_weight = log_sum_exp(weight_terms[i]);

  GlmbDensity posterior;
  posterior.time = prior.time + 1;
  posterior.components = std::move(components);
  normalize(posterior);

  // Prune on normalized weights, renormalize, order by weight, cap.
  if (cfg.prune_threshold > 0.0) {
    const double log_threshold = std::log(cfg.prune_threshold);
    std::vector<GlmbComponent> kept;
    kept.reserve(posterior.components.size());
    for (auto& c : posterior.components)
      if (c.log_weight >= log_threshold) kept.push_back(std::move(c));
    if (kept.empty()) {
      auto best = std::max_element(
          posterior.components.begin(), posterior.components.end(),
          [](const GlmbComponent& a, const GlmbComponent& b) {
            return a.log_weight < b.log_weight;
          });
      kept.push_back(std::move(*best));
    }
    posterior.components = std::move(kept);
    normalize(posterior);
  }
  std::stable_sort(posterior.components.begin(), posterior.components.end(),
                   [](const GlmbComponent& a, const GlmbComponent& b) {
                     return a.log_weight > b.log_weight;
                   });
  if (cfg.truncation == Truncation::gibbs &&
      posterior.components.size() > static_cast<std::size_t>(cfg.sample_budget)) {
    posterior.components.resize(static_cast<std::size_t>(cfg.sample_budget));
    normalize(posterior);
  }

  if (stats) {
    stats->seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0).count();
    stats->parent_components = static_cast<int>(active.size());
    stats->posterior_components = static_cast<int>(posterior.components.size());
    stats->unique_samples = unique_samples;
    stats->mode = cfg.gibbs.mode;
  }
  return posterior;
}

std::vector<double> cardinality_distribution(const GlmbDensity& d) {
  if (d.components.empty()) throw invalid_state("density has no components");
  std::size_t max_n = 0;
  for (const auto& c : d.components)
    max_n = std::max(max_n, c.labels.size());
  std::vector<double> pmf(max_n + 1, 0.0);
  double total = 0.0;
  for (const auto& c : d.components) {
    const double w = std::exp(c.log_weight);
    pmf[c.labels.size()] += w;
    total += w;
  }
  if (!(total > 0.0)) throw numeric_failure("density has no positive mass");
  for (auto& p : pmf) p /= total;
  return pmf;
}

TrackPosterior existence_and_track_density(const GlmbDensity& d, const Label& l) {
  if (d.components.empty()) throw invalid_state("density has no components");
  TrackPosterior out;
  double total = 0.0;
  for (const auto& c : d.components) {
    const double w = std::exp(c.log_weight);
    total += w;
    if (const Gaussian* g = c.find(l)) {
      out.existence += w;
      out.weights.push_back(w);
      out.densities.push_back(*g);
    }
  }
  if (out.weights.empty())
    throw no_such_track("label " + to_string(l) + " appears in no component");
  out.existence /= total;
  double sum = 0.0;
  for (double w : out.weights) sum += w;
  for (auto& w : out.weights) w /= sum;
  return out;
}

StateEstimate estimate(const GlmbDensity& d, const FilterConfig& cfg) {
  if (d.components.empty()) throw invalid_state("density has no components");
  StateEstimate est;
  est.time = d.time;
  est.cardinality = cardinality_distribution(d);

  if (cfg.estimator == EstimatorKind::map_cardinality) {
    std::size_t n_star = 0;
    for (std::size_t n = 1; n < est.cardinality.size(); ++n)
      if (est.cardinality[n] > est.cardinality[n_star]) n_star = n;
    const GlmbComponent* best = nullptr;
    for (const auto& c : d.components) {
      if (c.labels.size() != n_star) continue;
      if (best == nullptr || c.log_weight > best->log_weight ||
          (c.log_weight == best->log_weight &&
           (c.labels < best->labels ||
            (c.labels == best->labels && c.lineage < best->lineage))))
        best = &c;
    }
    if (best == nullptr) throw internal_error("no component at the MAP cardinality");
    est.labels = best->labels;
    for (const auto& g : best->tracks) est.means.push_back(g.mean);
    return est;
  }

  // existence_threshold: collect labels, then mixture means.
  std::vector<Label> labels;
  for (const auto& c : d.components)
    for (const auto& l : c.labels) labels.push_back(l);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  for (const Label& l : labels) {
    const TrackPosterior tp = existence_and_track_density(d, l);
    if (tp.existence <= cfg.existence_threshold) continue;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(tp.densities[0].dim());
    for (std::size_t i = 0; i < tp.densities.size(); ++i)
      mean += tp.weights[i] * tp.densities[i].mean;
    est.labels.push_back(l);
    est.means.push_back(std::move(mean));
  }
  return est;
}

}  // namespace glmb
