#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "glmb/exhaustive.hpp"
#include "glmb/runner.hpp"

namespace fs = std::filesystem;

namespace {

/// Exit codes: 0 success, 1 internal error, 2 bad configuration or usage,
/// 3 unreadable or malformed input file, 4 numeric breakdown.
int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const glmb::input_error& e) {
    std::cerr << "input error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << '\n';
    return 3;
  } catch (const glmb::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const glmb::invalid_model& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const glmb::numeric_failure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

struct GenerateArgs {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int duration = 0;
  bool duration_set = false;
};

int do_generate(const GenerateArgs& args) {
  glmb::ScenarioConfig cfg = args.config.empty()
                                 ? glmb::reference_config()
                                 : glmb::load_config(args.config);
  if (args.seed_set) cfg.seed = args.seed;
  if (args.duration_set) cfg.duration = args.duration;

  const glmb::Scenario sc = glmb::generate_scenario(cfg);
  fs::create_directories(args.out);
  const std::string scans = (fs::path(args.out) / "scans.csv").string();
  const std::string truth = (fs::path(args.out) / "truth.csv").string();
  glmb::write_scans(scans, sc.scans);
  glmb::write_truth(truth, sc.truth, cfg.axes);

  std::size_t measurements = 0;
  for (const auto& s : sc.scans)
    for (const auto& per : s.by_sensor) measurements += per.size();
  std::size_t appearances = 0;
  for (const auto& t : sc.truth) appearances += t.size();
  std::cout << "wrote " << scans << " (" << measurements
            << " measurements) and " << truth << " (" << appearances
            << " object appearances over " << cfg.duration << " steps)\n";
  return 0;
}

struct RunArgs {
  std::string config;
  std::string scans;
  std::string truth;
  std::string out = ".";
  std::string mode;
  std::string factors;
  std::string estimator;
  std::string truncation;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int sweeps = 0;
  bool sweeps_set = false;
  double temper = 0.0;
  bool temper_set = false;
  double ospa_cutoff = 100.0;
  double ospa_order = 1.0;
  int duration = 0;
  bool duration_set = false;
  bool quiet = false;
};

int do_run(const RunArgs& args) {
  glmb::ScenarioConfig cfg = args.config.empty()
                                 ? glmb::reference_config()
                                 : glmb::load_config(args.config);
  const int config_duration = cfg.duration;
  if (!args.mode.empty())
    cfg.filter.gibbs.mode = glmb::sampler_mode_from_string(args.mode);
  if (!args.factors.empty())
    cfg.filter.gibbs.markov_factors =
        glmb::markov_factors_from_string(args.factors);
  if (!args.estimator.empty())
    cfg.filter.estimator = glmb::estimator_kind_from_string(args.estimator);
  if (!args.truncation.empty())
    cfg.filter.truncation = glmb::truncation_from_string(args.truncation);
  if (args.seed_set) cfg.filter.gibbs.rng_seed = args.seed;
  if (args.sweeps_set) cfg.filter.sample_budget = args.sweeps;
  if (args.temper_set) cfg.filter.gibbs.temper_exponent = args.temper;
  if (args.duration_set) cfg.duration = args.duration;

  // Read against the larger horizon so a --duration prefix of a longer file
  // works; rows past the configured horizon still flag a config mismatch.
  auto scans = glmb::read_scans(args.scans, cfg.suite,
                                std::max(cfg.duration, config_duration));
  scans.resize(static_cast<std::size_t>(cfg.duration));

  glmb::StepCallback progress;
  if (!args.quiet)
    progress = [](int k, const glmb::StepResult& r) {
      const std::size_t n = r.estimate.labels.size();
      const double p =
          n < r.estimate.cardinality.size() ? r.estimate.cardinality[n] : 0.0;
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "step %4d: %2zu objects (p=%.2f)  %4d components  %5d "
                    "unique  %.3fs",
                    k, n, p, r.stats.posterior_components,
                    r.stats.unique_samples, r.stats.seconds);
      std::cout << buf << std::endl;
    };

  const glmb::RunSummary run = glmb::run_tracker(cfg, scans, progress);

  fs::create_directories(args.out);
  const fs::path out(args.out);
  glmb::write_estimates((out / "estimates.csv").string(), run, cfg.axes);
  glmb::write_cardinality((out / "cardinality.csv").string(), run);
  glmb::write_summary((out / "summary.json").string(), cfg, run);

  if (!args.truth.empty()) {
    auto truth = glmb::read_truth(args.truth, cfg.axes,
                                  std::max(cfg.duration, config_duration));
    truth.resize(static_cast<std::size_t>(cfg.duration));
    const glmb::OspaParams params{args.ospa_cutoff, args.ospa_order};
    const auto scores = glmb::score_against_truth(run, truth, cfg.axes, params);
    glmb::write_ospa((out / "ospa.csv").string(), truth, run, scores);
    double mean = 0.0;
    for (const auto& s : scores) mean += s.total;
    mean /= static_cast<double>(scores.size());
    char buf[96];
    std::snprintf(buf, sizeof buf, "mean distance %.2f (cutoff %.0f)", mean,
                  params.cutoff);
    std::cout << buf << '\n';
  }

  char buf[96];
  std::snprintf(buf, sizeof buf, "tracked %d steps in %.2fs, outputs in %s",
                cfg.duration, run.total_seconds,
                fs::absolute(out).string().c_str());
  std::cout << buf << '\n';
  return 0;
}

Eigen::VectorXd scalar(double v) {
  Eigen::VectorXd z(1);
  z[0] = v;
  return z;
}

int do_verify() {
  using namespace glmb;
  bool all_ok = true;
  const auto report = [&](const char* name, bool pass,
                          const std::string& detail) {
    std::cout << (pass ? "[ok]   " : "[fail] ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << '\n';
    all_ok = all_ok && pass;
  };

  // A small two-sensor, one-axis model with two birth sites.
  const MotionModel motion = constant_velocity(1, 1.0, 1.0, 0.9);
  BirthModel birth;
  for (double center : {0.0, 5.0}) {
    BirthEntry e;
    e.prob = 0.1;
    e.density.mean = Eigen::Vector2d(center, 0.0);
    e.density.cov = Eigen::Vector2d(4.0, 1.0).asDiagonal();
    birth.entries.push_back(std::move(e));
  }
  MultiSensorSuite suite;
  suite.sensors.push_back(
      position_sensor({0}, 1, {0.5}, 0.7, 2.0, {{-20.0, 20.0}}));
  suite.sensors.push_back(
      position_sensor({0}, 1, {0.7}, 0.6, 1.0, {{-20.0, 20.0}}));
  MultiScan scan;
  scan.by_sensor = {{scalar(0.1), scalar(5.2)}, {scalar(-0.2)}};

  GlmbDensity prior;
  prior.time = 0;
  prior.components.emplace_back();

  // 1: the filter's full-enumeration path equals the reference enumeration.
  {
    const GlmbDensity exact =
        exact_update(prior, motion, birth, suite, scan, 0.0);
    FilterConfig fc;
    fc.truncation = Truncation::exhaustive;
    fc.prune_threshold = 0.0;
    const GlmbDensity got =
        joint_update(prior, motion, birth, suite, scan, fc);

    using Key = std::pair<std::vector<Label>, std::uint64_t>;
    std::map<Key, double> want, have;
    for (const auto& c : exact.components)
      want[{c.labels, c.lineage}] = std::exp(c.log_weight);
    for (const auto& c : got.components)
      have[{c.labels, c.lineage}] = std::exp(c.log_weight);
    double worst = want.size() == have.size()
                       ? 0.0
                       : std::numeric_limits<double>::infinity();
    for (const auto& [key, w] : want) {
      const auto it = have.find(key);
      if (it == have.end()) {
        worst = std::numeric_limits<double>::infinity();
        break;
      }
      worst = std::max(worst, std::abs(w - it->second));
    }
    report("enumeration paths agree", worst < 1e-9,
           "largest weight gap " + std::to_string(worst));

    // 2: dense and on-demand conditionals match on a non-trivial parent.
    const GlmbComponent& parent = exact.components.front();
    const auto dense = AssociationWeightTable::build(
        parent, motion, birth, 2, suite, scan, SamplerMode::dense);
    const auto fact = AssociationWeightTable::build(
        parent, motion, birth, 2, suite, scan, SamplerMode::factorized);
    const AssociationArray init = initial_association(dense);
    double gap = 0.0;
    for (int n = 0; n < init.rows(); ++n) {
      const auto a = conditional_row_dist(dense, n, init);
      const auto b = conditional_row_dist(fact, n, init);
      for (std::size_t i = 0; i < a.size(); ++i)
        gap = std::max(gap, std::abs(a[i] - b[i]));
    }
    report("sampling conditionals consistent", gap < 1e-12,
           "largest gap " + std::to_string(gap));
  }

  // 3: rerunning a short scenario reproduces every estimate exactly.
  {
    ScenarioConfig cfg = reference_config();
    cfg.duration = 4;
    cfg.seed = 7;
    cfg.filter.sample_budget = 100;
    cfg.filter.gibbs.rng_seed = 11;
    const Scenario sc = generate_scenario(cfg);
    const RunSummary a = run_tracker(cfg, sc.scans);
    const RunSummary b = run_tracker(cfg, sc.scans);
    bool same = a.steps.size() == b.steps.size();
    for (std::size_t k = 0; same && k < a.steps.size(); ++k) {
      const auto& ea = a.steps[k].estimate;
      const auto& eb = b.steps[k].estimate;
      same = ea.labels == eb.labels && ea.cardinality == eb.cardinality;
      for (std::size_t i = 0; same && i < ea.means.size(); ++i)
        same = (ea.means[i].array() == eb.means[i].array()).all();
    }
    report("reruns are bit-identical", same, "");
  }

  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-sensor multi-object tracker"};
  app.require_subcommand(1);
  app.footer(
      "The GLMB_THREADS environment variable caps worker threads during "
      "updates (default: hardware concurrency).");

  GenerateArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "generate", "Simulate a scenario and write scans.csv and truth.csv");
  gen->add_option("-c,--config", gen_args.config,
                  "Scenario JSON (defaults to the built-in three-sensor one)")
      ->check(CLI::ExistingFile);
  gen->add_option("-o,--out", gen_args.out, "Output directory")
      ->capture_default_str();
  gen->add_option("--seed", gen_args.seed, "Override the simulation seed");
  gen->add_option("--duration", gen_args.duration,
                  "Override the number of steps")
      ->check(CLI::PositiveNumber);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand(
      "run", "Track a scans file and write estimate, count and score CSVs");
  run->add_option("-c,--config", run_args.config,
                  "Scenario JSON (defaults to the built-in three-sensor one)")
      ->check(CLI::ExistingFile);
  run->add_option("-s,--scans", run_args.scans, "Measurement CSV to track")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("-t,--truth", run_args.truth,
                  "Truth CSV; enables ospa.csv scoring")
      ->check(CLI::ExistingFile);
  run->add_option("-o,--out", run_args.out, "Output directory")
      ->capture_default_str();
  run->add_option("--mode", run_args.mode,
                  "Sampler: dense, factorized or markov")
      ->check(CLI::IsMember({"dense", "factorized", "markov"}));
  run->add_option("--factors", run_args.factors,
                  "Surrogate factors: independent or pairwise")
      ->check(CLI::IsMember({"independent", "pairwise"}));
  run->add_option("--estimator", run_args.estimator,
                  "map_cardinality or existence_threshold")
      ->check(CLI::IsMember({"map_cardinality", "existence_threshold"}));
  run->add_option("--truncation", run_args.truncation,
                  "gibbs or exhaustive (exhaustive: tiny problems only)")
      ->check(CLI::IsMember({"gibbs", "exhaustive"}));
  run->add_option("--seed", run_args.seed, "Override the filter seed");
  run->add_option("--sweeps", run_args.sweeps,
                  "Gibbs sweeps shared across components per update")
      ->check(CLI::PositiveNumber);
  run->add_option("--temper", run_args.temper,
                  "Sampler tempering exponent (>= 1)");
  run->add_option("--ospa-cutoff", run_args.ospa_cutoff,
                  "Score cutoff distance")
      ->capture_default_str();
  run->add_option("--ospa-order", run_args.ospa_order, "Score order p")
      ->capture_default_str();
  run->add_option("--duration", run_args.duration,
                  "Override the number of steps")
      ->check(CLI::PositiveNumber);
  run->add_flag("-q,--quiet", run_args.quiet, "Suppress per-step progress");

  CLI::App* verify = app.add_subcommand(
      "verify", "Run built-in cross-checks and report ok or fail per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*gen) {
    gen_args.seed_set = gen->count("--seed") > 0;
    gen_args.duration_set = gen->count("--duration") > 0;
    return guarded([&] { return do_generate(gen_args); });
  }
  if (*run) {
    run_args.seed_set = run->count("--seed") > 0;
    run_args.sweeps_set = run->count("--sweeps") > 0;
    run_args.temper_set = run->count("--temper") > 0;
    run_args.duration_set = run->count("--duration") > 0;
    return guarded([&] { return do_run(run_args); });
  }
  if (*verify) return guarded([] { return do_verify(); });
  return 2;
}
