#pragma once

#include <cstdint>
#include <vector>

#include "glmb/error.hpp"
#include "glmb/label.hpp"

namespace glmb {

/// Joint measurement assignment for one retained label: measurements[s] is
/// the index chosen at sensor s, 0 meaning missed detection.
struct Assignment {
  Label label;
  std::vector<int> measurements;

  bool operator==(const Assignment&) const = default;
};

/// One multi-sensor association hypothesis over P candidate tracks.
///
/// Entry (i, s) is the measurement index row i takes at sensor s: -1 if the
/// track is dropped, 0 for a missed detection, 1..M(s) for a measurement.
/// Rows are all-or-nothing: either every entry is -1 or none is. A row with
/// entries >= 0 everywhere is called "kept".
class AssociationArray {
 public:
  AssociationArray() = default;

  /// All rows start dropped (-1).
  AssociationArray(int rows, std::vector<int> sensor_sizes)
      : rows_(checked_rows(rows)),
        sensor_sizes_(checked_sizes(std::move(sensor_sizes))),
        data_(static_cast<std::size_t>(rows_) * sensor_sizes_.size(), -1) {}

  int rows() const { return rows_; }
  int sensors() const { return static_cast<int>(sensor_sizes_.size()); }
  const std::vector<int>& sensor_sizes() const { return sensor_sizes_; }

  int operator()(int i, int s) const { return data_[idx(i, s)]; }
  int& operator()(int i, int s) { return data_[idx(i, s)]; }

  bool row_kept(int i) const { return data_[idx(i, 0)] >= 0; }

  /// Number of cells a row can take: the dropped row plus every joint
  /// measurement tuple, 1 + prod_s (1 + M(s)).
  std::size_t cell_count() const {
    std::size_t n = 1;
    for (int m : sensor_sizes_) n *= static_cast<std::size_t>(m) + 1;
    return n + 1;
  }

  /// Cell index of row i in canonical mixed-radix order: 0 is the dropped
  /// row; kept tuples follow with the last sensor varying fastest.
  std::size_t row_cell(int i) const {
    if (!row_kept(i)) return 0;
    std::size_t c = 0;
    for (int s = 0; s < sensors(); ++s)
      c = c * (static_cast<std::size_t>(sensor_sizes_[s]) + 1) +
          static_cast<std::size_t>(data_[idx(i, s)]);
    return c + 1;
  }

  /// Writes the row encoded by cell index c (inverse of row_cell).
  void set_row_cell(int i, std::size_t c) {
    if (c == 0) {
      for (int s = 0; s < sensors(); ++s) data_[idx(i, s)] = -1;
      return;
    }
    --c;
    for (int s = sensors() - 1; s >= 0; --s) {
      const std::size_t base = static_cast<std::size_t>(sensor_sizes_[s]) + 1;
      data_[idx(i, s)] = static_cast<int>(c % base);
      c /= base;
    }
  }

  bool operator==(const AssociationArray&) const = default;

  /// Throws invalid_argument if any entry lies outside {-1, ..., M(s)}.
  void check_entry_range() const {
    for (int i = 0; i < rows_; ++i)
      for (int s = 0; s < sensors(); ++s) {
        const int v = (*this)(i, s);
        if (v < -1 || v > sensor_sizes_[s])
          throw invalid_argument("association entry outside {-1..M} at row " +
                                 std::to_string(i));
      }
  }

 private:
  static int checked_rows(int rows) {
    if (rows < 0) throw invalid_argument("negative row count");
    return rows;
  }

  static std::vector<int> checked_sizes(std::vector<int> sizes) {
    if (sizes.empty()) throw invalid_argument("need at least one sensor");
    for (int m : sizes)
      if (m < 0) throw invalid_argument("negative measurement count");
    return sizes;
  }

  std::size_t idx(int i, int s) const {
    return static_cast<std::size_t>(i) * sensor_sizes_.size() +
           static_cast<std::size_t>(s);
  }

  int rows_ = 0;
  std::vector<int> sensor_sizes_;
  std::vector<int> data_;
};

/// True iff every row is all-or-nothing -1 and, per sensor, no two rows share
/// a positive measurement index. Throws invalid_argument on out-of-range
/// entries.
bool is_positive_one_one(const AssociationArray& a);

/// Evaluates the factorized validity indicator anchored at row n: the product
/// of the validity of the other rows and, for each sensor, a conflict factor
/// between row n and every other row. Equal to is_positive_one_one on arrays
/// whose rows are individually all-or-nothing; the factorization is what
/// makes single-row Gibbs conditionals cheap.
double indicator_factorization_check(const AssociationArray& a, int n);

/// Extracts the retained labels and their measurement tuples from a valid
/// array. labels[i] names row i; output is ordered by row.
std::vector<Assignment> convert(const AssociationArray& a,
                                const std::vector<Label>& labels);

/// Inverse of convert: builds the array over `labels` that keeps exactly the
/// given assignments. Labels absent from `assignments` get dropped rows.
AssociationArray from_assignments(const std::vector<Label>& labels,
                                  const std::vector<int>& sensor_sizes,
                                  const std::vector<Assignment>& assignments);

}  // namespace glmb
