// Copyright 2026 The ccforest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CCF_DATASET_HPP
#define CCF_DATASET_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccf/matrix.hpp"

namespace ccf {

enum class ColumnRole { kOrdinal, kOrdered, kCategorical, kLabel };

struct SchemaColumn {
  std::string name;
  ColumnRole role = ColumnRole::kOrdinal;
  // Level dictionary: declared in the schema file for ordered columns, learned
  // from training data (first-appearance order) for categorical ones.
  std::vector<std::string> levels;
};

/// Declarative description of a CSV: one role per column, exactly one label.
/// Text format, one `role: name` line per column; ordered columns list their
/// levels as `ordered: name = low,mid,high`.
struct Schema {
  std::vector<SchemaColumn> columns;
  std::size_t label_col = 0;
  std::vector<std::string> class_names;

  std::size_t n_classes() const { return class_names.size(); }

  static Schema parse_file(const std::string& path);
  static Schema parse_text(const std::string& text, const std::string& origin);
  std::string to_text() const;
};

/// One logical feature and the contiguous block of encoded columns it owns.
/// Categorical features expand to one indicator column per level but still
/// count as a single feature when sampling.
struct FeatureGroup {
  std::string name;
  bool one_hot = false;
  std::uint32_t col_begin = 0;
  std::uint32_t col_end = 0;  // exclusive

  std::uint32_t width() const { return col_end - col_begin; }
};

/// Encoded dataset: numeric matrix (missing cells hold 0 and are flagged in
/// the mask), integer class labels, and the grouping needed to treat one-hot
/// blocks as single features. Immutable once built.
class Dataset {
 public:
  Schema schema;
  std::vector<FeatureGroup> groups;
  Matrix x;                           // n_rows x n_encoded_cols, raw values
  std::vector<std::uint8_t> missing;  // n_rows x n_encoded_cols flags
  std::vector<int> labels;            // class index per row, -1 if unlabeled

  std::size_t n_rows() const { return x.rows(); }
  std::size_t n_cols() const { return x.cols(); }
  std::size_t n_features() const { return groups.size(); }
  std::size_t n_classes() const { return schema.n_classes(); }

  bool is_missing(std::size_t r, std::size_t c) const {
    return missing[r * n_cols() + c] != 0;
  }
  const std::uint8_t* missing_row(std::size_t r) const {
    return missing.data() + r * n_cols();
  }

  /// Row subset (copy); order of `rows` is preserved.
  Dataset subset(const std::vector<int>& rows) const;

  /// Observed min/max per encoded column (missing cells excluded). Constant
  /// or fully missing columns report (0, 0).
  std::pair<std::vector<double>, std::vector<double>> column_ranges() const;
};

/// Parse a CSV with header against the schema, learning categorical level
/// dictionaries and class names from the data in first-appearance order.
/// Empty fields and "?" are missing; a missing or unknown-format value in the
/// label column is an error. Errors name the offending row and column.
Dataset load_csv(const std::string& path, const Schema& schema);

/// Same, but against a frozen schema (dictionaries already fixed, e.g. from a
/// trained model). Unseen categorical levels encode as all-zeros over their
/// group; unseen class labels are an error; missing labels become -1.
Dataset load_csv_frozen(const std::string& path, const Schema& schema);

Dataset parse_csv_text(const std::string& text, const Schema& schema,
                       bool frozen, const std::string& origin);

/// Encode one row of raw fields (strings, CSV order) with a frozen schema.
/// Returns encoded values and missing flags; label output is -1 when absent.
void encode_row_frozen(const Schema& schema,
                       const std::vector<FeatureGroup>& groups,
                       const std::vector<std::string>& fields,
                       std::size_t row_index_for_errors,
                       std::vector<double>& values_out,
                       std::vector<std::uint8_t>& missing_out, int& label_out);

/// Write a dataset back out as CSV + schema text (used by the generators).
void write_csv(const Dataset& ds, const std::string& path);

/// Per-column z-score statistics fitted on training data only. Missing cells
/// are excluded from the estimates; constant columns record sigma = 0 and
/// transform to 0.
struct Standardizer {
  std::vector<double> mu;
  std::vector<double> sigma;  // sample standard deviation, divisor N-1

  static Standardizer fit(const Dataset& ds);

  /// z-scores in place; missing cells are set to 0 afterwards, which equals
  /// the training mean in the transformed space.
  void apply(Dataset& ds) const;
  void apply_row(double* values, const std::uint8_t* miss,
                 std::size_t n) const;
};

/// Fit + apply on the same data; the returned dataset has all cells observed
/// (imputed values become real zeros).
Dataset standardized_copy(const Dataset& ds);

struct FoldSplit {
  std::vector<int> train;
  std::vector<int> test;
};

/// Partition {0..N-1} into near-equal disjoint folds, stratified by class
/// unless disabled. Classes with fewer members than folds fall back to
/// unstratified placement for those rows (with a warning on stderr).
/// Deterministic for a given seed.
std::vector<FoldSplit> make_folds(const Dataset& ds, std::size_t folds,
                                  std::uint64_t seed, bool stratified);

}  // namespace ccf

#endif  // CCF_DATASET_HPP
