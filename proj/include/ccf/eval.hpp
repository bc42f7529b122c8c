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

#ifndef CCF_EVAL_HPP
#define CCF_EVAL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccf/dataset.hpp"
#include "ccf/forest.hpp"

namespace ccf {

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::string mode;
  std::size_t n_trees = 0;
  double error_pct = 0.0;
  double kappa = 0.0;
  double train_seconds = 0.0;
};

struct PredictionRecord {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  int row = 0;  // row index in the original dataset
  int truth = 0;
  int predicted = 0;
};

struct EvalReport {
  std::vector<FoldResult> folds;
  std::vector<PredictionRecord> predictions;  // filled on request only

  double mean_error_pct() const;
  double std_error_pct() const;  // sample std over the fold results
  double mean_kappa() const;

  /// CSV with header repeat,fold,mode,n_trees,error_pct,kappa,train_seconds.
  std::string to_csv() const;
  /// CSV with header repeat,fold,row,truth,predicted (class indices).
  std::string predictions_csv() const;
};

struct CrossValOptions {
  std::size_t folds = 10;
  std::size_t repeats = 1;
  bool inverted = false;  // train on one fold, test on the rest
  bool stratified = true;
  bool keep_predictions = false;
  std::uint64_t seed = 0;
};

/// Repeated k-fold cross-validation. Preprocessing statistics are refit
/// inside every training split; nothing leaks from the test rows. Fold
/// errors carry the (repeat, fold) context when training fails.
EvalReport cross_validate(const Dataset& ds, const ForestConfig& cfg,
                          const CrossValOptions& opt);

/// Chance-corrected agreement. Equal-length inputs of class indices; 1 when
/// both are identical single-class sequences.
double cohen_kappa(std::span<const int> pred, std::span<const int> truth);

struct WilcoxonResult {
  double w_plus = 0.0;       // signed-rank sum of positive differences
  std::size_t n_used = 0;    // pairs remaining after dropping zero differences
  double p_two_sided = 1.0;
  double p_greater = 1.0;    // alternative: a tends larger than b
  bool exact = true;
};

/// Wilcoxon signed-rank test on paired samples. Zero differences are
/// dropped; ties get average ranks. Exact null distribution up to 25 pairs,
/// normal approximation with continuity (and tie) correction above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a,
                                    std::span<const double> b);

struct SweepResult {
  std::vector<std::size_t> sizes;
  std::vector<double> mean_error_pct;  // over all folds x repeats
};

/// Error versus ensemble size: the largest forest is trained once per fold
/// and smaller ensembles reuse its per-tree predictions (prefix votes).
SweepResult ensemble_size_sweep(const Dataset& ds, const ForestConfig& cfg,
                                std::vector<std::size_t> sizes,
                                const CrossValOptions& opt);

}  // namespace ccf

#endif  // CCF_EVAL_HPP
