#pragma once

#include <string>
#include <vector>

#include "glmb/density.hpp"
#include "glmb/gibbs.hpp"
#include "glmb/models.hpp"

namespace glmb {

/// How a point estimate is read off the posterior.
///  - map_cardinality: take the MAP cardinality n*, then the heaviest
///    component with exactly n* labels and its track means.
///  - existence_threshold: report every label whose existence probability
///    clears the threshold, with its mixture mean.
enum class EstimatorKind { map_cardinality, existence_threshold };

/// How the posterior component set is truncated: Gibbs sampling (the normal
/// path) or full enumeration of every association (small problems only,
/// subject to the enumeration size guard).
enum class Truncation { gibbs, exhaustive };

std::string to_string(EstimatorKind k);
EstimatorKind estimator_kind_from_string(const std::string& name);
std::string to_string(Truncation t);
Truncation truncation_from_string(const std::string& name);

struct FilterConfig {
  int sample_budget = 1000;       // Gibbs sweeps shared across components per update
  double prune_threshold = 1e-9;  // on normalized posterior weights
  EstimatorKind estimator = EstimatorKind::map_cardinality;
  double existence_threshold = 0.5;
  GibbsConfig gibbs;
  Truncation truncation = Truncation::gibbs;
};

void validate(const FilterConfig& cfg);

struct UpdateStats {
  double seconds = 0.0;
  int parent_components = 0;   // components allocated at least one sweep
  int posterior_components = 0;
  int unique_samples = 0;      // distinct associations across all parents
  SamplerMode mode = SamplerMode::dense;
};

/// One joint prediction-update step: allocates the sweep budget over parent
/// components multinomially by weight, runs one Gibbs chain per allocated
/// component (in parallel, capped by the GLMB_THREADS environment variable),
/// expands every distinct association into a posterior component with its
/// exact weight, merges duplicates by (labels, lineage), prunes, renormalizes
/// and sorts by weight. Weights never depend on sample multiplicities, so a
/// fixed seed gives a bit-identical posterior.
GlmbDensity joint_update(const GlmbDensity& prior, const MotionModel& motion,
                         const BirthModel& birth, const MultiSensorSuite& suite,
                         const MultiScan& scan, const FilterConfig& cfg,
                         UpdateStats* stats = nullptr);

/// Posterior cardinality distribution; entry n is the probability of exactly
/// n objects. Sums to 1 for a normalized density.
std::vector<double> cardinality_distribution(const GlmbDensity& d);

struct TrackPosterior {
  double existence = 0.0;
  std::vector<double> weights;      // mixture weights, sum to 1
  std::vector<Gaussian> densities;  // aligned with weights
};

/// Existence probability and density mixture of one label. Throws
/// no_such_track if no component contains the label.
TrackPosterior existence_and_track_density(const GlmbDensity& d, const Label& l);

struct StateEstimate {
  int time = 0;
  std::vector<Label> labels;
  std::vector<Eigen::VectorXd> means;  // aligned with labels
  std::vector<double> cardinality;     // posterior cardinality distribution
};

/// Point estimate per cfg.estimator. Ties on the MAP cardinality go to the
/// smaller count; ties between equally heavy components go to the
/// lexicographically smaller label set, then the smaller lineage id.
StateEstimate estimate(const GlmbDensity& d, const FilterConfig& cfg);

}  // namespace glmb
