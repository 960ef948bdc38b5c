#pragma once

#include <cstdint>
#include <vector>

#include "glmb/association.hpp"
#include "glmb/gaussian.hpp"
#include "glmb/label.hpp"

namespace glmb {

/// One weighted hypothesis of a labeled multi-object density: a label set,
/// one Gaussian per label, and a history id telling apart components whose
/// label sets coincide but whose association histories differ.
struct GlmbComponent {
  std::vector<Label> labels;     // sorted, pairwise distinct
  std::vector<Gaussian> tracks;  // aligned with labels
  double log_weight = 0.0;
  std::uint64_t lineage = 0;

  int cardinality() const { return static_cast<int>(labels.size()); }
  const Gaussian* find(const Label& l) const;
};

/// Mixture of labeled hypotheses at one time step. Weights live in log space;
/// a normalized density has log-weights summing to one in linear space.
struct GlmbDensity {
  std::vector<GlmbComponent> components;
  int time = 0;
};

/// log(sum_i exp(v_i)) with max shift; -inf for an empty list.
double log_sum_exp(const std::vector<double>& v);

/// Rescales log-weights so the linear weights sum to 1. Throws invalid_state
/// on an empty density and numeric_failure if no weight is finite.
void normalize(GlmbDensity& d);

/// Throws invalid_state unless labels are sorted, distinct and aligned with
/// the track list in every component.
void check_component_structure(const GlmbDensity& d);

/// Hash-chains a parent history id with the measurement tuples chosen for the
/// retained labels. Equal inputs give equal ids; the id is what makes merged
/// components safe to collapse by weight addition, since equal history implies
/// equal track densities.
std::uint64_t chain_lineage(std::uint64_t parent,
                            const std::vector<Assignment>& assignments);

}  // namespace glmb
