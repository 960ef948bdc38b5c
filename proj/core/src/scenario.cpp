#include "glmb/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "glmb/error.hpp"
#include "glmb/random.hpp"

namespace glmb {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw invalid_argument("missing config field " + path);
  return *it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw invalid_argument(path + " must be a number");
  return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw invalid_argument(path + " must be an integer");
  return j.get<int>();
}

std::uint64_t seed_at(const json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw invalid_argument(path + " must be an integer");
  if (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)
    throw invalid_argument(path + " must be non-negative");
  return j.get<std::uint64_t>();
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) throw invalid_argument(path + " must be a string");
  return j.get<std::string>();
}

std::vector<double> numbers_at(const json& j, const std::string& path) {
  if (!j.is_array())
    throw invalid_argument(path + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number())
      throw invalid_argument(path + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Eigen::VectorXd vector_at(const json& j, Eigen::Index want,
                          const std::string& path) {
  const auto vals = numbers_at(j, path);
  if (static_cast<Eigen::Index>(vals.size()) != want)
    throw invalid_argument(path + " must have " + std::to_string(want) +
                           " entries");
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), want);
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& path) {
  for (const auto& item : j.items()) {
    if (std::any_of(known.begin(), known.end(),
                    [&](const char* k) { return item.key() == k; }))
      continue;
    throw invalid_argument("unknown config field " + path + "." + item.key());
  }
}

const json& object_field(const json& j, const char* key,
                         const std::string& path) {
  const json& f = field(j, key, path);
  if (!f.is_object()) throw invalid_argument(path + " must be an object");
  return f;
}

ScenarioConfig parse_config(const json& j) {
  reject_unknown(j, {"scenario", "motion", "births", "sensors", "filter"},
                 "config");
  ScenarioConfig cfg;

  const json& sc = object_field(j, "scenario", "scenario");
  reject_unknown(sc, {"duration", "period", "seed", "axes"}, "scenario");
  cfg.duration = int_at(field(sc, "duration", "scenario.duration"),
                        "scenario.duration");
  cfg.period = number_at(field(sc, "period", "scenario.period"),
                         "scenario.period");
  cfg.seed = seed_at(field(sc, "seed", "scenario.seed"), "scenario.seed");
  if (sc.contains("axes")) cfg.axes = int_at(sc["axes"], "scenario.axes");
  if (cfg.axes < 1) throw invalid_argument("scenario.axes must be >= 1");
  if (!(cfg.period > 0.0))
    throw invalid_argument("scenario.period must be positive");
  const Eigen::Index dim = 2 * cfg.axes;

  const json& mo = object_field(j, "motion", "motion");
  reject_unknown(mo, {"accel_std", "survival_prob"}, "motion");
  cfg.motion = constant_velocity(
      cfg.axes, cfg.period,
      number_at(field(mo, "accel_std", "motion.accel_std"),
                "motion.accel_std"),
      number_at(field(mo, "survival_prob", "motion.survival_prob"),
                "motion.survival_prob"));

  const json& births = field(j, "births", "births");
  if (!births.is_array() || births.empty())
    throw invalid_argument("births must be a non-empty array");
  for (std::size_t i = 0; i < births.size(); ++i) {
    const std::string path = "births[" + std::to_string(i) + "]";
    const json& b = births[i];
    if (!b.is_object()) throw invalid_argument(path + " must be an object");
    reject_unknown(b, {"prob", "mean", "std"}, path);
    BirthEntry e;
    e.prob = number_at(field(b, "prob", path + ".prob"), path + ".prob");
    e.density.mean =
        vector_at(field(b, "mean", path + ".mean"), dim, path + ".mean");
    const Eigen::VectorXd dev =
        vector_at(field(b, "std", path + ".std"), dim, path + ".std");
    e.density.cov = dev.array().square().matrix().asDiagonal();
    cfg.birth.entries.push_back(std::move(e));
  }

  const json& sensors = field(j, "sensors", "sensors");
  if (!sensors.is_array() || sensors.empty())
    throw invalid_argument("sensors must be a non-empty array");
  for (std::size_t s = 0; s < sensors.size(); ++s) {
    const std::string path = "sensors[" + std::to_string(s) + "]";
    const json& e = sensors[s];
    if (!e.is_object()) throw invalid_argument(path + " must be an object");
    reject_unknown(e, {"axes", "noise_std", "detect_prob", "clutter_rate",
                       "region"},
                   path);
    std::vector<int> axes;
    if (e.contains("axes")) {
      const json& ax = e["axes"];
      if (!ax.is_array())
        throw invalid_argument(path + ".axes must be an array of integers");
      for (std::size_t a = 0; a < ax.size(); ++a)
        axes.push_back(int_at(ax[a], path + ".axes"));
    } else {
      for (int a = 0; a < cfg.axes; ++a) axes.push_back(a);
    }
    const auto noise =
        numbers_at(field(e, "noise_std", path + ".noise_std"),
                   path + ".noise_std");
    const json& rg = field(e, "region", path + ".region");
    if (!rg.is_array() || rg.size() != axes.size())
      throw invalid_argument(path +
                             ".region must hold one [lo, hi] pair per axis");
    std::vector<std::array<double, 2>> region;
    for (std::size_t a = 0; a < rg.size(); ++a) {
      const auto pair = numbers_at(rg[a], path + ".region");
      if (pair.size() != 2 || !(pair[0] < pair[1]))
        throw invalid_argument(path + ".region entries must be [lo, hi] with lo < hi");
      region.push_back({pair[0], pair[1]});
    }
    cfg.suite.sensors.push_back(position_sensor(
        axes, cfg.axes, noise,
        number_at(field(e, "detect_prob", path + ".detect_prob"),
                  path + ".detect_prob"),
        number_at(field(e, "clutter_rate", path + ".clutter_rate"),
                  path + ".clutter_rate"),
        region));
  }

  if (j.contains("filter")) {
    const json& f = j["filter"];
    if (!f.is_object()) throw invalid_argument("filter must be an object");
    reject_unknown(f, {"sample_budget", "prune_threshold", "estimator",
                       "existence_threshold", "truncation", "gibbs"},
                   "filter");
    if (f.contains("sample_budget"))
      cfg.filter.sample_budget =
          int_at(f["sample_budget"], "filter.sample_budget");
    if (f.contains("prune_threshold"))
      cfg.filter.prune_threshold =
          number_at(f["prune_threshold"], "filter.prune_threshold");
    if (f.contains("estimator"))
      cfg.filter.estimator = estimator_kind_from_string(
          string_at(f["estimator"], "filter.estimator"));
    if (f.contains("existence_threshold"))
      cfg.filter.existence_threshold =
          number_at(f["existence_threshold"], "filter.existence_threshold");
    if (f.contains("truncation"))
      cfg.filter.truncation = truncation_from_string(
          string_at(f["truncation"], "filter.truncation"));
    if (f.contains("gibbs")) {
      const json& g = f["gibbs"];
      if (!g.is_object())
        throw invalid_argument("filter.gibbs must be an object");
      reject_unknown(g, {"seed", "temper_exponent", "mode", "markov_factors"},
                     "filter.gibbs");
      if (g.contains("seed"))
        cfg.filter.gibbs.rng_seed = seed_at(g["seed"], "filter.gibbs.seed");
      if (g.contains("temper_exponent"))
        cfg.filter.gibbs.temper_exponent =
            number_at(g["temper_exponent"], "filter.gibbs.temper_exponent");
      if (g.contains("mode"))
        cfg.filter.gibbs.mode = sampler_mode_from_string(
            string_at(g["mode"], "filter.gibbs.mode"));
      if (g.contains("markov_factors"))
        cfg.filter.gibbs.markov_factors = markov_factors_from_string(
            string_at(g["markov_factors"], "filter.gibbs.markov_factors"));
    }
  }

  validate(cfg);
  return cfg;
}

/// Zero-mean Gaussian draw; tolerates singular covariances (the process noise
/// of a nearly-constant-velocity model is rank deficient).
Eigen::VectorXd gaussian_noise(const Eigen::MatrixXd& cov, Rng& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw numeric_failure("noise covariance eigendecomposition failed");
  const Eigen::VectorXd scale = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::VectorXd draws(cov.rows());
  for (Eigen::Index i = 0; i < draws.size(); ++i) draws[i] = rng.normal();
  return eig.eigenvectors() * (scale.asDiagonal() * draws);
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  if (cfg.duration < 1) throw invalid_argument("duration must be >= 1");
  if (!(cfg.period > 0.0)) throw invalid_argument("period must be positive");
  if (cfg.axes < 1) throw invalid_argument("axes must be >= 1");
  const Eigen::Index dim = 2 * cfg.axes;
  validate(cfg.motion);
  if (cfg.motion.F.rows() != dim)
    throw invalid_model("motion model dimension does not match the axis count");
  validate(cfg.birth, dim);
  validate(cfg.suite, dim);
  validate(cfg.filter);
}

ScenarioConfig reference_config() {
  ScenarioConfig cfg;
  cfg.duration = 100;
  cfg.period = 1.0;
  cfg.seed = 1;
  cfg.axes = 3;
  cfg.motion = constant_velocity(3, cfg.period, 5.0, 0.99);

  const double means[4][6] = {
      {0, 0, 0, 0, 0, 0},
      {400, 0, -600, 0, 200, 0},
      {-800, 0, -200, 0, -400, 0},
      {-200, 0, 800, 0, 600, 0},
  };
  for (const auto& m : means) {
    BirthEntry e;
    e.prob = 0.03;
    e.density.mean = Eigen::Map<const Eigen::Matrix<double, 6, 1>>(m);
    e.density.cov = Eigen::MatrixXd::Identity(6, 6) * 100.0;
    cfg.birth.entries.push_back(std::move(e));
  }

  const std::vector<std::array<double, 2>> box(3, {-1000.0, 1000.0});
  const double stds[3][3] = {{10, 100, 100}, {100, 10, 100}, {100, 100, 10}};
  for (const auto& s : stds)
    cfg.suite.sensors.push_back(position_sensor(
        {0, 1, 2}, 3, {s[0], s[1], s[2]}, 0.66, 20.0, box));

  cfg.filter.sample_budget = 1000;
  cfg.filter.prune_threshold = 1e-9;
  cfg.filter.gibbs.temper_exponent = 3.0;
  cfg.filter.gibbs.mode = SamplerMode::markov;
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open config file " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    long line = 1;
    const std::size_t stop =
        std::min(text.size(), static_cast<std::size_t>(e.byte));
    for (std::size_t i = 0; i < stop; ++i)
      if (text[i] == '\n') ++line;
    throw input_error(std::string("config parse failure: ") + e.what(), line);
  }
  if (!j.is_object()) throw invalid_argument("config root must be an object");
  return parse_config(j);
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  Scenario out;
  out.truth.reserve(static_cast<std::size_t>(cfg.duration));
  out.scans.reserve(static_cast<std::size_t>(cfg.duration));

  std::vector<TruthState> live;
  for (int k = 1; k <= cfg.duration; ++k) {
    std::vector<TruthState> next;
    next.reserve(live.size() + cfg.birth.entries.size());
    for (const auto& t : live) {
      if (!rng.bernoulli(cfg.motion.survival_prob)) continue;
      next.push_back(
          {t.label, cfg.motion.F * t.state + gaussian_noise(cfg.motion.Q, rng)});
    }
    for (std::size_t i = 0; i < cfg.birth.entries.size(); ++i) {
      const auto& e = cfg.birth.entries[i];
      if (!rng.bernoulli(e.prob)) continue;
      next.push_back({Label{k, static_cast<std::int32_t>(i)},
                      e.density.mean + gaussian_noise(e.density.cov, rng)});
    }
    live = std::move(next);

    MultiScan scan;
    scan.by_sensor.resize(cfg.suite.sensors.size());
    for (std::size_t s = 0; s < cfg.suite.sensors.size(); ++s) {
      const SensorModel& sensor = cfg.suite.sensors[s];
      auto& zs = scan.by_sensor[s];
      for (const auto& t : live) {
        if (!rng.bernoulli(sensor.detect_prob)) continue;
        Eigen::VectorXd z = sensor.H * t.state + gaussian_noise(sensor.R, rng);
        if (sensor.in_region(z)) zs.push_back(std::move(z));
      }
      const int clutter = rng.poisson(sensor.clutter_rate);
      for (int c = 0; c < clutter; ++c) {
        Eigen::VectorXd z(sensor.meas_dim());
        for (Eigen::Index d = 0; d < z.size(); ++d) {
          const auto& b = sensor.region[static_cast<std::size_t>(d)];
          z[d] = rng.uniform(b[0], b[1]);
        }
        zs.push_back(std::move(z));
      }
    }
    out.truth.push_back(live);
    out.scans.push_back(std::move(scan));
  }
  return out;
}

}  // namespace glmb
