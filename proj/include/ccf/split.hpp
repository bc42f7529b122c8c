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

#ifndef CCF_SPLIT_HPP
#define CCF_SPLIT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ccf {

enum class SplitCriterion { kInfoGain, kGini };

/// A threshold split on one column of the projected node matrix. The gain is
/// measured relative to leaving the node as a leaf (bits for the information
/// criterion) and is never negative; the threshold lies strictly between two
/// distinct values present in the column.
struct SplitCandidate {
  std::size_t proj_index = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Shannon entropy of a count vector, in bits, with 0*log(0) == 0.
double entropy_bits(std::span<const int> counts);

/// Gini impurity 1 - sum p_i^2.
double gini_impurity(std::span<const int> counts);

/// Scratch space reused across nodes so the search allocates nothing in
/// steady state.
struct SplitScratch {
  std::vector<std::size_t> order;
  std::vector<int> left_counts;
  std::vector<int> right_counts;
};

/// Exhaustive best split over the columns of U (column-major: `columns[c]`
/// points at n contiguous values). Every boundary between consecutive
/// distinct sorted values is scored; the threshold is the midpoint of the two
/// neighbours. Ties prefer the lowest column index, then the lowest
/// threshold. Returns nothing when every column is constant.
std::optional<SplitCandidate> find_best_split(
    std::span<const double* const> columns, std::size_t n_rows,
    std::span<const int> labels, std::size_t n_classes,
    SplitCriterion criterion, SplitScratch& scratch);

}  // namespace ccf

#endif  // CCF_SPLIT_HPP
