#pragma once

#include <Eigen/Dense>
#include <vector>

namespace glmb {

struct OspaParams {
  double cutoff = 100.0;  // c > 0, also the per-miss penalty
  double order = 1.0;     // p >= 1
};

struct OspaResult {
  double total = 0.0;
  double localization = 0.0;  // mean matched distance (cut at c), per pair
  double cardinality = 0.0;   // penalty from the count mismatch
};

/// Minimum-cost square assignment, Hungarian with potentials, O(n^3).
/// Returns the column assigned to each row.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

/// Optimal sub-pattern assignment distance between two point sets: the best
/// matching of min(|a|, |b|) pairs with distances cut at the cutoff, plus a
/// cutoff-sized penalty per unmatched point, averaged over max(|a|, |b|).
/// total^p * max(m, n) = localization^p * matched + cutoff^p * |m - n|.
/// Empty vs empty is (0, 0, 0); the total never exceeds the cutoff.
OspaResult ospa(const std::vector<Eigen::VectorXd>& a,
                const std::vector<Eigen::VectorXd>& b, const OspaParams& params);

}  // namespace glmb
