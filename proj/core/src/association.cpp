#include "glmb/association.hpp"

#include <algorithm>

namespace glmb {

bool is_positive_one_one(const AssociationArray& a) {
  a.check_entry_range();
  for (int i = 0; i < a.rows(); ++i) {
    const bool kept = a(i, 0) >= 0;
    for (int s = 1; s < a.sensors(); ++s)
      if ((a(i, s) >= 0) != kept) return false;  // mixed row
  }
  for (int s = 0; s < a.sensors(); ++s) {
    std::vector<bool> seen(static_cast<std::size_t>(a.sensor_sizes()[s]) + 1, false);
    for (int i = 0; i < a.rows(); ++i) {
      const int v = a(i, s);
      if (v <= 0) continue;  // dropped and missed entries may repeat
      if (seen[static_cast<std::size_t>(v)]) return false;
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
  return true;
}

double indicator_factorization_check(const AssociationArray& a, int n) {
  a.check_entry_range();
  if (n < 0 || n >= a.rows()) throw invalid_argument("row index out of range");

  // Validity of the sub-array formed by the other rows.
  for (int i = 0; i < a.rows(); ++i) {
    if (i == n) continue;
    const bool kept = a(i, 0) >= 0;
    for (int s = 1; s < a.sensors(); ++s)
      if ((a(i, s) >= 0) != kept) return 0.0;
  }
  for (int s = 0; s < a.sensors(); ++s) {
    std::vector<bool> seen(static_cast<std::size_t>(a.sensor_sizes()[s]) + 1, false);
    for (int i = 0; i < a.rows(); ++i) {
      if (i == n) continue;
      const int v = a(i, s);
      if (v <= 0) continue;
      if (seen[static_cast<std::size_t>(v)]) return 0.0;
      seen[static_cast<std::size_t>(v)] = true;
    }
  }

  // Conflict factors between row n and each other row, per sensor. Only a
  // positive entry of row n can collide.
  double value = 1.0;
  for (int s = 0; s < a.sensors(); ++s) {
    const int v = a(n, s);
    if (v <= 0) continue;
    for (int i = 0; i < a.rows(); ++i) {
      if (i == n) continue;
      if (a(i, s) == v) value *= 0.0;
    }
  }
  return value;
}

std::vector<Assignment> convert(const AssociationArray& a,
                                const std::vector<Label>& labels) {
  if (static_cast<int>(labels.size()) != a.rows())
    throw invalid_argument("label list size does not match row count");
  if (!is_positive_one_one(a))
    throw invalid_argument("array is not positive 1-1");
  std::vector<Assignment> out;
  for (int i = 0; i < a.rows(); ++i) {
    if (!a.row_kept(i)) continue;
    Assignment e;
    e.label = labels[static_cast<std::size_t>(i)];
    e.measurements.resize(static_cast<std::size_t>(a.sensors()));
    for (int s = 0; s < a.sensors(); ++s)
      e.measurements[static_cast<std::size_t>(s)] = a(i, s);
    out.push_back(std::move(e));
  }
  return out;
}

AssociationArray from_assignments(const std::vector<Label>& labels,
                                  const std::vector<int>& sensor_sizes,
                                  const std::vector<Assignment>& assignments) {
  AssociationArray a(static_cast<int>(labels.size()), sensor_sizes);
  for (const Assignment& e : assignments) {
    const auto it = std::find(labels.begin(), labels.end(), e.label);
    if (it == labels.end())
      throw invalid_argument("assignment label " + to_string(e.label) +
                             " not among candidate labels");
    const int i = static_cast<int>(it - labels.begin());
    if (e.measurements.size() != sensor_sizes.size())
      throw invalid_argument("assignment tuple has wrong sensor count");
    for (int s = 0; s < static_cast<int>(sensor_sizes.size()); ++s)
      a(i, s) = e.measurements[static_cast<std::size_t>(s)];
  }
  a.check_entry_range();
  return a;
}

}  // namespace glmb
