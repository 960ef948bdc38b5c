#pragma once

#include <cstdint>
#include <vector>

#include "glmb/association.hpp"
#include "glmb/weights.hpp"

namespace glmb {

struct GibbsConfig {
  int iterations = 1;             // full sweeps over all rows
  std::uint64_t rng_seed = 0;
  double temper_exponent = 1.0;   // sampler targets weights^(1/temper_exponent)
  SamplerMode mode = SamplerMode::dense;
  MarkovFactors markov_factors = MarkovFactors::independent;
};

void validate(const GibbsConfig& cfg);

/// Distinct association arrays visited by a sampler run, in first-visit
/// order, with visit counts summing to the sweep count.
struct SampleBatch {
  std::vector<AssociationArray> samples;
  std::vector<int> counts;
  /// Peak number of live categorical weights held while drawing one entry;
  /// the dense sampler needs a full cell buffer, the factorized and markov
  /// samplers only a per-sensor one.
  std::size_t max_live_categories = 0;
};

/// Starting state: survivor rows keep all-miss tuples (always conflict-free),
/// birth rows start dropped.
AssociationArray initial_association(const AssociationWeightTable& t);

/// Conditional distribution of row n given the other rows of `current`, over
/// cells in canonical order (0 = dropped row). Mode dense and factorized give
/// the exact single-row conditional; mode markov gives the surrogate one.
/// Weights are raised to 1/temper before normalizing.
std::vector<double> conditional_row_dist(const AssociationWeightTable& t, int n,
                                         const AssociationArray& current,
                                         double temper = 1.0);

/// Systematic-scan Gibbs sampling over table rows, recording the state after
/// each sweep. init must be positive 1-1; every recorded state is too. Fixed
/// seeds give identical batches.
SampleBatch gibbs_dense(const AssociationWeightTable& t,
                        const AssociationArray& init, const GibbsConfig& cfg);

/// Same chain as gibbs_dense (identical conditionals, drawn sensor by sensor
/// via exact suffix sums) with memory independent of the joint cell count.
SampleBatch gibbs_factorized(const AssociationWeightTable& t,
                             const AssociationArray& init,
                             const GibbsConfig& cfg);

/// Gibbs on the product-form surrogate target; per-row cost is the sum of
/// per-sensor measurement counts. Samples must be reweighted with exact row
/// weights by the consumer.
SampleBatch gibbs_markov(const AssociationWeightTable& t,
                         const AssociationArray& init, const GibbsConfig& cfg);

/// Dispatches on cfg.mode; the table must have been built in the same mode.
SampleBatch run_gibbs(const AssociationWeightTable& t,
                      const AssociationArray& init, const GibbsConfig& cfg);

}  // namespace glmb
