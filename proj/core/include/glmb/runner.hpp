#pragma once

#include <functional>
#include <string>
#include <vector>

#include "glmb/filter.hpp"
#include "glmb/ospa.hpp"
#include "glmb/scenario.hpp"

namespace glmb {

/// One tracking step: the point estimate read off the posterior plus the
/// update's cost counters.
struct StepResult {
  StateEstimate estimate;
  UpdateStats stats;
};

struct RunSummary {
  std::vector<StepResult> steps;
  double total_seconds = 0.0;
};

using StepCallback = std::function<void(int step, const StepResult&)>;

/// Run the filter over all scans, starting from the empty prior. scans.size()
/// must equal cfg.duration; progress, if set, is called after every step.
RunSummary run_tracker(const ScenarioConfig& cfg,
                       const std::vector<MultiScan>& scans,
                       const StepCallback& progress = {});

/// Distance between estimated and true position sets per step, extracting
/// the position coordinates from the interleaved state layout.
std::vector<OspaResult> score_against_truth(
    const RunSummary& run, const std::vector<std::vector<TruthState>>& truth,
    int axes, const OspaParams& params);

/// CSV files. Floating-point values are printed with round-trip precision,
/// so rerunning with the same seeds reproduces every file byte for byte.
/// Readers skip blank lines and lines that do not start with a number, which
/// covers headers and # comments. Positions and velocities are de-interleaved
/// in truth and estimate files (x1..xa, then v1..va); labels print as
/// "birth_step:index".

void write_scans(const std::string& path, const std::vector<MultiScan>& scans);

/// Reads measurements gathered per step and sensor. Steps run 1..duration;
/// rows may arrive in any order. Throws input_error with the line number on
/// malformed rows, out-of-range indices or dimension mismatches.
std::vector<MultiScan> read_scans(const std::string& path,
                                  const MultiSensorSuite& suite, int duration);

void write_truth(const std::string& path,
                 const std::vector<std::vector<TruthState>>& truth, int axes);

std::vector<std::vector<TruthState>> read_truth(const std::string& path,
                                                int axes, int duration);

void write_estimates(const std::string& path, const RunSummary& run, int axes);

/// Per step: the estimated object count and its posterior probability.
void write_cardinality(const std::string& path, const RunSummary& run);

/// Per step: true and estimated counts plus the distance decomposition.
void write_ospa(const std::string& path,
                const std::vector<std::vector<TruthState>>& truth,
                const RunSummary& run, const std::vector<OspaResult>& scores);

/// Machine-readable run report (configuration echo, wall times, component
/// counts). Unlike the CSVs this contains timings, so it varies across runs.
void write_summary(const std::string& path, const ScenarioConfig& cfg,
                   const RunSummary& run);

}  // namespace glmb
