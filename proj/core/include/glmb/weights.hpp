#pragma once

#include <string>
#include <vector>

#include "glmb/density.hpp"
#include "glmb/kalman.hpp"
#include "glmb/models.hpp"

namespace glmb {

/// How single-row Gibbs conditionals are represented and drawn.
enum class SamplerMode { dense, factorized, markov };

/// Factor choice for the markov surrogate target: per-sensor factors computed
/// from the predicted density alone, or conditioned on the previous sensor's
/// choice (better fit, quadratic cost in measurement counts).
enum class MarkovFactors { independent, pairwise };

std::string to_string(SamplerMode m);
SamplerMode sampler_mode_from_string(const std::string& name);
std::string to_string(MarkovFactors f);
MarkovFactors markov_factors_from_string(const std::string& name);

/// One candidate track of an update: a survivor carried over from a parent
/// component or a birth candidate.
struct WeightRow {
  Label label;
  Gaussian predicted;       // survival-predicted prior, or the birth density
  double keep_prob = 0.0;   // survival or birth probability
  double drop_weight = 0.0; // weight of the dropped (all -1) row
  bool is_birth = false;
};

/// Unnormalized weights of every (row, joint measurement tuple) pair, the
/// quantity single-row conditionals are proportional to. Row i at a kept
/// tuple (j_1..j_S) weighs keep_prob * prod_s f_s, where f_s is the
/// single-sensor association factor chained through sensors 1..s-1; the
/// dropped row weighs 1 - keep_prob.
///
/// Storage depends on the sampler mode:
///  - dense: every cell weight precomputed; memory grows with the product of
///    per-sensor measurement counts.
///  - factorized: weights evaluated on demand by chaining single-sensor
///    updates; memory stays bounded by the largest single-sensor count while
///    conditionals remain exactly the dense ones.
///  - markov: per-sensor factor tables for a product-form surrogate whose
///    support contains the exact target's; draws cost a sum, not a product,
///    of per-sensor counts, and are corrected later by exact reweighting.
///
/// Model-built tables keep pointers to the sensor suite and scan, which must
/// outlive the table.
class AssociationWeightTable {
 public:
  static AssociationWeightTable build(const GlmbComponent& parent,
                                      const MotionModel& motion,
                                      const BirthModel& birth, int birth_time,
                                      const MultiSensorSuite& suite,
                                      const MultiScan& scan, SamplerMode mode,
                                      MarkovFactors factors = MarkovFactors::independent);

  /// Synthetic dense-mode table: cells[i][0] is row i's drop weight, the rest
  /// follow in mixed-radix order. All values must be positive and finite.
  static AssociationWeightTable from_dense(std::vector<int> sensor_sizes,
                                           std::vector<std::vector<double>> cells);

  int rows() const { return static_cast<int>(rows_.size()); }
  int sensors() const { return static_cast<int>(sensor_sizes_.size()); }
  const std::vector<int>& sensor_sizes() const { return sensor_sizes_; }
  SamplerMode mode() const { return mode_; }
  MarkovFactors markov_factors() const { return markov_factors_; }
  const WeightRow& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }

  /// Dropped-row cell plus every kept tuple.
  std::size_t cell_count() const;

  std::vector<Label> labels() const;

  /// Exact weight of a kept tuple under the original target, irrespective of
  /// mode (synthetic tables read their cells, model tables chain updates).
  double row_weight(int i, const std::vector<int>& tuple) const;

  /// log of row_weight, accumulated factor by factor.
  double log_row_weight(int i, const std::vector<int>& tuple) const;

  /// Weight of a kept tuple under the markov surrogate target.
  double surrogate_row_weight(int i, const std::vector<int>& tuple) const;

  const std::vector<double>& dense_cells(int i) const;

  /// Surrogate factor f_s(j) for the independent choice; j in 0..M(s).
  double surrogate_factor(int i, int s, int j) const;

  /// Surrogate factor f_s(j | j_prev) for the pairwise choice; s >= 1.
  double surrogate_pair_factor(int i, int s, int j_prev, int j) const;

  const MultiSensorSuite* suite() const { return suite_; }
  const MultiScan* scan() const { return scan_; }

 private:
  SamplerMode mode_ = SamplerMode::dense;
  MarkovFactors markov_factors_ = MarkovFactors::independent;
  std::vector<int> sensor_sizes_;
  std::vector<WeightRow> rows_;
  std::vector<std::vector<double>> dense_;  // dense mode: per row, per cell
  // markov mode: factor_[i][s][j]; pair_[i][s][j_prev * (1 + M(s)) + j]
  std::vector<std::vector<std::vector<double>>> factor_;
  std::vector<std::vector<std::vector<double>>> pair_;
  const MultiSensorSuite* suite_ = nullptr;
  const MultiScan* scan_ = nullptr;
};

}  // namespace glmb
