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

#ifndef CCF_FOREST_HPP
#define CCF_FOREST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ccf/dataset.hpp"
#include "ccf/tree.hpp"

namespace ccf {

enum class ForestMode { kCcf, kCcfBag, kRf };

const char* forest_mode_name(ForestMode mode);
ForestMode forest_mode_from_name(const std::string& name);

struct ForestConfig {
  std::size_t n_trees = 500;
  // 0 = default rule ceil(log2(D) + 1), except lambda = 2 when D = 3, where
  // D counts logical features before one-hot expansion.
  std::size_t lambda = 0;
  ForestMode mode = ForestMode::kCcf;
  SplitCriterion criterion = SplitCriterion::kInfoGain;
  double epsilon = 1e-4;
  std::uint64_t seed = 0;
  bool leaf_on_degenerate = false;
  // 0 = env CCF_THREADS, falling back to the hardware count.
  std::size_t n_threads = 0;
  // Re-route every training row after growth and verify the structural
  // invariants (leaf coverage, child counts); training fails loudly on any
  // violation.
  bool audit = false;
};

std::size_t default_lambda(std::size_t n_features);

/// Per-class vote fractions; each entry is (votes for class) / n_trees.
struct ClassDistribution {
  std::vector<double> fractions;

  int argmax() const {  // ties to the lowest class index
    int best = 0;
    for (std::size_t k = 1; k < fractions.size(); ++k)
      if (fractions[k] > fractions[best]) best = static_cast<int>(k);
    return best;
  }
};

/// A trained ensemble plus everything needed to apply it: the frozen schema
/// (with learned level dictionaries), the standardizer fitted on the training
/// data, and per-column raw ranges (used for decision-surface grids).
/// Immutable after training; prediction is safe from any number of threads.
class Forest {
 public:
  Schema schema;
  std::vector<FeatureGroup> groups;
  Standardizer standardizer;
  std::vector<double> col_min, col_max;
  ForestConfig config;
  std::size_t lambda_used = 0;
  bool per_tree_bagging = false;
  std::vector<Tree> trees;

  std::size_t n_classes() const { return schema.n_classes(); }
  std::size_t n_encoded_cols() const { return standardizer.mu.size(); }

  /// Votes over an already encoded raw row (values + missing flags,
  /// standardization applied internally).
  ClassDistribution predict_proba(const double* raw_values,
                                  const std::uint8_t* missing_flags) const;
  int predict(const double* raw_values, const std::uint8_t* missing_flags) const;

  /// Votes over a row of CSV fields in schema order.
  ClassDistribution predict_proba_fields(
      const std::vector<std::string>& fields) const;

  /// Votes over a row that is already standardized (internal fast path).
  ClassDistribution predict_proba_standardized(const double* x) const;

  /// First `n_trees` trees only; used by the ensemble-size studies.
  ClassDistribution predict_proba_standardized_prefix(const double* x,
                                                      std::size_t n_trees) const;
};

/// Train a forest per the configured mode:
///  - ccf: projection bootstrap inside every node, trees see the full data
///    (per-tree bagging replaces it when lambda spans all features);
///  - ccf-bag: per-tree bagging, no projection bootstrap;
///  - rf: per-tree bagging with axis-aligned splits on the sampled columns.
/// Trees are independent given per-tree RNG streams derived from (seed, tree
/// index); results do not depend on thread scheduling.
Forest train(const Dataset& ds, const ForestConfig& cfg);

/// Standardize an encoded dataset with the forest's frozen statistics and
/// return the routed label of every row (fast batch path).
std::vector<int> predict_dataset(const Forest& forest, const Dataset& ds);

}  // namespace ccf

#endif  // CCF_FOREST_HPP
