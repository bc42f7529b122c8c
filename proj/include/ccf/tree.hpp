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

#ifndef CCF_TREE_HPP
#define CCF_TREE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ccf/cca.hpp"
#include "ccf/matrix.hpp"
#include "ccf/rng.hpp"
#include "ccf/split.hpp"

namespace ccf {

/// Why growth stopped at a leaf; recorded so the structural invariants can be
/// audited after training.
enum class StopReason : std::uint8_t {
  kNotLeaf = 0,
  kPure,           // single class at the node
  kDegenerate,     // identical rows / single class after the fallback ladder
  kNoFeatures,     // every available feature lost its variation
  kNoGain,         // best split gain <= 0
  kNoProjection,   // CCA returned zero pairs
  kNumeric,        // a numeric guard refused the partition
};

/// Binary tree with sparse hyperplane splits. Node 0 is the root. Split
/// nodes route x left when dot(phi, x) <= threshold; phi is stored sparsely
/// as (column, weight) pairs confined to the feature subset sampled at the
/// node (a single pair for axis-aligned trees).
struct TreeNode {
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t phi_begin = 0;
  std::uint32_t phi_end = 0;
  double threshold = 0.0;
  std::int32_t n_train = 0;
  std::int16_t label = -1;
  StopReason stop = StopReason::kNotLeaf;

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<std::uint32_t> phi_cols;
  std::vector<double> phi_weights;

  std::size_t n_leaves() const;
  std::size_t depth() const;

  /// Projection of a feature row onto a node's split direction. Routing and
  /// training-time partitioning both go through here so they agree bit for
  /// bit.
  double project(const TreeNode& node, const double* x) const {
    double acc = 0.0;
    for (std::uint32_t i = node.phi_begin; i < node.phi_end; ++i)
      acc += phi_weights[i] * x[phi_cols[i]];
    return acc;
  }

  /// Leaf label for a feature vector: descend, left on projection <= s.
  int route(const double* x) const {
    std::size_t j = 0;
    while (!nodes[j].is_leaf())
      j = static_cast<std::size_t>(project(nodes[j], x) <= nodes[j].threshold
                                       ? nodes[j].left
                                       : nodes[j].right);
    return nodes[j].label;
  }

  /// Node id of the leaf a feature vector reaches.
  std::size_t route_to_leaf(const double* x) const {
    std::size_t j = 0;
    while (!nodes[j].is_leaf())
      j = static_cast<std::size_t>(project(nodes[j], x) <= nodes[j].threshold
                                       ? nodes[j].left
                                       : nodes[j].right);
    return j;
  }
};

struct GrowConfig {
  std::size_t lambda = 1;          // logical features sampled per node
  bool projection_bootstrap = true;
  bool axis_aligned = false;       // skip CCA, split raw sampled columns
  bool leaf_on_degenerate = false; // degenerate bootstrap: leaf instead of
                                   // falling back to the node's full data
  SplitCriterion criterion = SplitCriterion::kInfoGain;
  CcaConfig cca;
};

/// Column-group view of the logical features (owned by the dataset).
struct FeatureLayout {
  const std::uint32_t* group_begin = nullptr;  // per feature, encoded range
  const std::uint32_t* group_end = nullptr;
  std::size_t n_features = 0;
};

/// Grow one tree on the given rows of a standardized feature matrix.
/// `rows` lists row indices into `x`; the tree records, per leaf, how many of
/// them it absorbed. If `leaf_of_row` is non-null it receives, for each entry
/// of `rows`, the node id of the leaf that training assigned it to (same
/// order as `rows`).
Tree grow_tree(const Matrix& x, std::span<const int> labels,
               std::size_t n_classes, std::span<const int> rows,
               const FeatureLayout& features, const GrowConfig& cfg, Rng& rng,
               std::vector<std::int32_t>* leaf_of_row = nullptr);

/// Plurality label with the tie-break chain: ties among classes are resolved
/// by the counts one level up, recursing towards the root; a tie that
/// survives the root goes to the lowest class index. `ancestors` is ordered
/// root first; the node's own counts sit in `counts`.
int leaf_label(std::span<const int> counts,
               std::span<const std::vector<int>> ancestors);

}  // namespace ccf

#endif  // CCF_TREE_HPP
