#pragma once

#include <vector>

#include "glmb/association.hpp"
#include "glmb/density.hpp"
#include "glmb/models.hpp"
#include "glmb/weights.hpp"

namespace glmb {

/// Every positive 1-1 association array over `rows` rows, in lexicographic
/// cell order. Guarded: throws too_large when (prod_s (M(s) + 2))^rows
/// exceeds 1e7. Brute force by construction; exists to check the samplers
/// and the filter, not to be fast.
std::vector<AssociationArray> enumerate_assignments(
    int rows, const std::vector<int>& sensor_sizes);

/// Exact normalized probability of every positive 1-1 array under a weight
/// table, accumulated in extended precision and plain (non-log) arithmetic.
struct EnumeratedTarget {
  std::vector<AssociationArray> support;
  std::vector<double> probability;

  /// Probability of one array; 0 if it is not positive 1-1.
  double probability_of(const AssociationArray& a) const;
};

/// surrogate = false evaluates the exact target (product of exact row
/// weights); surrogate = true evaluates the markov product-form target.
/// Weights are raised to 1/temper before normalizing.
EnumeratedTarget exact_target(const AssociationWeightTable& t,
                              double temper = 1.0, bool surrogate = false);

/// Association factor and posterior computed in one shot: all detected
/// sensors stacked into a single joint measurement, one linear solve, the
/// standard (non-Joseph) covariance form. Algebraically equal to chaining
/// single-sensor updates; deliberately a different code path so the two can
/// cross-check each other.
DetectionFactor stacked_association(const Gaussian& g,
                                    const MultiSensorSuite& suite,
                                    const std::vector<int>& tuple,
                                    const MultiScan& scan);

/// Exact multi-object posterior by full enumeration: for every parent
/// component every positive 1-1 array is expanded, weighed in extended
/// precision, and merged by (labels, lineage). Components below
/// prune_threshold (on normalized weights) are dropped, then weights are
/// renormalized. Subject to the enumerate_assignments size guard.
GlmbDensity exact_update(const GlmbDensity& prior, const MotionModel& motion,
                         const BirthModel& birth, const MultiSensorSuite& suite,
                         const MultiScan& scan, double prune_threshold = 0.0);

}  // namespace glmb
