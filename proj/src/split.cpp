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

#include "ccf/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccf {

double entropy_bits(std::span<const int> counts) {
  long total = 0;
  for (const int c : counts) total += c;
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (const int c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double gini_impurity(std::span<const int> counts) {
  long total = 0;
  for (const int c : counts) total += c;
  if (total <= 0) return 0.0;
  double acc = 0.0;
  for (const int c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    acc += p * p;
  }
  return 1.0 - acc;
}

namespace {

double impurity(std::span<const int> counts, SplitCriterion crit) {
  return crit == SplitCriterion::kInfoGain ? entropy_bits(counts)
                                           : gini_impurity(counts);
}

}  // namespace

std::optional<SplitCandidate> find_best_split(
    std::span<const double* const> columns, std::size_t n_rows,
    std::span<const int> labels, std::size_t n_classes,
    SplitCriterion criterion, SplitScratch& scratch) {
  if (n_rows < 2 || columns.empty()) return std::nullopt;

  scratch.right_counts.assign(n_classes, 0);
  for (std::size_t i = 0; i < n_rows; ++i) ++scratch.right_counts[labels[i]];
  const double parent_impurity = impurity(scratch.right_counts, criterion);
  const double n = static_cast<double>(n_rows);

  std::optional<SplitCandidate> best;
  for (std::size_t col = 0; col < columns.size(); ++col) {
    const double* u = columns[col];

    scratch.order.resize(n_rows);
    std::iota(scratch.order.begin(), scratch.order.end(), std::size_t{0});
    std::sort(scratch.order.begin(), scratch.order.end(),
              [u](std::size_t a, std::size_t b) { return u[a] < u[b]; });

    scratch.left_counts.assign(n_classes, 0);
    scratch.right_counts.assign(n_classes, 0);
    for (std::size_t i = 0; i < n_rows; ++i) ++scratch.right_counts[labels[i]];

    for (std::size_t i = 0; i + 1 < n_rows; ++i) {
      const int cls = labels[scratch.order[i]];
      ++scratch.left_counts[cls];
      --scratch.right_counts[cls];
      const double lo = u[scratch.order[i]];
      const double hi = u[scratch.order[i + 1]];
      if (lo == hi) continue;
      const double threshold = lo + (hi - lo) * 0.5;
      // Adjacent doubles may have no representable value strictly between
      // them; such a boundary cannot be routed and is skipped.
      if (!(threshold > lo && threshold < hi)) continue;

      const double n_left = static_cast<double>(i + 1);
      const double n_right = n - n_left;
      double gain = parent_impurity -
                    (n_left / n) * impurity(scratch.left_counts, criterion) -
                    (n_right / n) * impurity(scratch.right_counts, criterion);
      if (gain < 0.0) gain = 0.0;  // clamp rounding residue

      // Strict improvement only: scanning columns ascending and thresholds
      // ascending makes ties resolve to the lowest index and threshold.
      if (!best || gain > best->gain) best = SplitCandidate{col, threshold, gain};
    }
  }
  return best;
}

}  // namespace ccf
