#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glmb/filter.hpp"
#include "glmb/models.hpp"

namespace glmb {

/// Everything needed to simulate and track one scenario. Steps run 1..duration;
/// the state layout is (x1, v1, x2, v2, ...) over `axes` spatial axes.
struct ScenarioConfig {
  int duration = 0;
  double period = 1.0;
  std::uint64_t seed = 0;  // simulation stream; the filter stream is filter.gibbs.rng_seed
  int axes = 3;
  MotionModel motion;
  BirthModel birth;
  MultiSensorSuite suite;
  FilterConfig filter;
};

void validate(const ScenarioConfig& cfg);

/// The built-in scenario: three sensors watching a cube 2000 units across,
/// nearly-constant-velocity targets, four birth sites, each sensor precise
/// along one axis and coarse along the other two.
ScenarioConfig reference_config();

/// Read a scenario from a JSON file. Parse failures raise input_error with
/// the offending line; structural and value problems raise invalid_argument
/// or invalid_model naming the bad field.
ScenarioConfig load_config(const std::string& path);

struct TruthState {
  Label label;
  Eigen::VectorXd state;
};

/// One simulated run: truth[k - 1] holds the objects alive at step k after
/// motion, and scans[k - 1] what the sensors returned there.
struct Scenario {
  std::vector<std::vector<TruthState>> truth;
  std::vector<MultiScan> scans;
};

/// Draw births, survival, motion, detections and clutter from cfg.seed.
/// Within each sensor's list, detections of live objects (in label order)
/// precede the clutter points. Detections falling outside the sensor region
/// are discarded.
Scenario generate_scenario(const ScenarioConfig& cfg);

}  // namespace glmb
