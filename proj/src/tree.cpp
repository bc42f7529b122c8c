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

#include "ccf/tree.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "ccf/kernels.hpp"

namespace ccf {

std::size_t Tree::n_leaves() const {
  std::size_t n = 0;
  for (const TreeNode& node : nodes)
    if (node.is_leaf()) ++n;
  return n;
}

std::size_t Tree::depth() const {
  // Iterative depth over the child arcs.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    const auto [j, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[j].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[j].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[j].right), d + 1);
    }
  }
  return deepest;
}

int leaf_label(std::span<const int> counts,
               std::span<const std::vector<int>> ancestors) {
  std::vector<int> tied;
  int best = -1;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > best) {
      best = counts[k];
      tied.clear();
    }
    if (counts[k] == best) tied.push_back(static_cast<int>(k));
  }
  // Resolve ties with the parent's counts, then the grandparent's, towards
  // the root; whatever tie survives goes to the lowest class index.
  for (std::size_t up = ancestors.size(); up-- > 0 && tied.size() > 1;) {
    const std::vector<int>& anc = ancestors[up];
    int anc_best = -1;
    for (const int k : tied) anc_best = std::max(anc_best, anc[k]);
    std::vector<int> kept;
    for (const int k : tied)
      if (anc[k] == anc_best) kept.push_back(k);
    tied.swap(kept);
  }
  return tied.front();
}

namespace {

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, std::span<const int> labels,
             std::size_t n_classes, const FeatureLayout& features,
             const GrowConfig& cfg, Rng& rng,
             std::vector<std::int32_t>* leaf_of_row)
      : x_(x),
        labels_(labels),
        n_classes_(n_classes),
        features_(features),
        cfg_(cfg),
        rng_(rng),
        leaf_of_row_(leaf_of_row) {}

  Tree run(std::span<const int> rows) {
    idx_.assign(rows.begin(), rows.end());
    pos_.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      pos_[i] = static_cast<std::int32_t>(i);
    if (leaf_of_row_ != nullptr) leaf_of_row_->assign(rows.size(), -1);

    std::vector<int> avail(features_.n_features);
    for (std::size_t f = 0; f < avail.size(); ++f)
      avail[f] = static_cast<int>(f);
    grow(0, idx_.size(), std::move(avail));
    return std::move(tree_);
  }

 private:
  std::size_t n_cols() const { return x_.cols(); }

  // --- node-local helpers ---------------------------------------------

  void node_counts(std::size_t begin, std::size_t end,
                   std::vector<int>& counts) const {
    counts.assign(n_classes_, 0);
    for (std::size_t i = begin; i < end; ++i)
      ++counts[labels_[static_cast<std::size_t>(idx_[i])]];
  }

  bool feature_varies(int feature, std::size_t begin, std::size_t end) const {
    for (std::uint32_t c = features_.group_begin[feature];
         c < features_.group_end[feature]; ++c) {
      const double first = x_(static_cast<std::size_t>(idx_[begin]), c);
      for (std::size_t i = begin + 1; i < end; ++i)
        if (x_(static_cast<std::size_t>(idx_[i]), c) != first) return true;
    }
    return false;
  }

  // Sample the feature subset for a node; removes variation-free features
  // from `avail` for the whole subtree. Empty result means no usable feature
  // remains.
  std::vector<int> sample_features(std::size_t begin, std::size_t end,
                                   std::vector<int>& avail) {
    std::vector<int> delta = rng_.sample_without_replacement(
        avail, std::min(cfg_.lambda, avail.size()));
    for (;;) {
      std::vector<int> bad;
      for (const int f : delta)
        if (!feature_varies(f, begin, end)) bad.push_back(f);
      if (bad.empty()) break;
      auto drop = [&bad](std::vector<int>& v) {
        std::erase_if(v, [&bad](int f) {
          return std::find(bad.begin(), bad.end(), f) != bad.end();
        });
      };
      drop(avail);
      drop(delta);
      if (avail.empty()) return {};
      const std::size_t target = std::min(cfg_.lambda, avail.size());
      if (delta.size() < target) {
        std::vector<int> pool;
        for (const int f : avail)
          if (std::find(delta.begin(), delta.end(), f) == delta.end())
            pool.push_back(f);
        const std::vector<int> extra = rng_.sample_without_replacement(
            std::move(pool), target - delta.size());
        delta.insert(delta.end(), extra.begin(), extra.end());
      }
    }
    std::sort(delta.begin(), delta.end());
    return delta;
  }

  std::vector<std::uint32_t> encoded_cols(const std::vector<int>& delta) const {
    std::vector<std::uint32_t> cols;
    for (const int f : delta)
      for (std::uint32_t c = features_.group_begin[f]; c < features_.group_end[f];
           ++c)
        cols.push_back(c);
    return cols;
  }

  // Gathers the node rows restricted to `cols` into a row-major scratch.
  void gather_node(std::size_t begin, std::size_t end,
                   const std::vector<std::uint32_t>& cols) {
    const std::size_t n = end - begin;
    const std::size_t g = cols.size();
    m_node_.resize(n * g);
    labels_node_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* src = x_.row(static_cast<std::size_t>(idx_[begin + i]));
      double* dst = m_node_.data() + i * g;
      for (std::size_t c = 0; c < g; ++c) dst[c] = src[cols[c]];
      labels_node_[i] = labels_[static_cast<std::size_t>(idx_[begin + i])];
    }
  }

  bool rows_identical(std::span<const std::size_t> view, std::size_t g) const {
    const double* first = m_node_.data() + view[0] * g;
    for (const std::size_t r : view) {
      const double* row = m_node_.data() + r * g;
      for (std::size_t c = 0; c < g; ++c)
        if (row[c] != first[c]) return false;
    }
    return true;
  }

  bool single_class(std::span<const std::size_t> view) const {
    const int first = labels_node_[view[0]];
    for (const std::size_t r : view)
      if (labels_node_[r] != first) return false;
    return true;
  }

  // 0, 1, 2 distinct rows, or 3 meaning "more than two". For the two-row
  // case the out-params are first-occurrence representatives.
  int count_unique_rows(std::span<const std::size_t> view, std::size_t g,
                        std::size_t& first, std::size_t& second) const {
    auto same = [&](std::size_t a, std::size_t b) {
      const double* ra = m_node_.data() + a * g;
      const double* rb = m_node_.data() + b * g;
      for (std::size_t c = 0; c < g; ++c)
        if (ra[c] != rb[c]) return false;
      return true;
    };
    first = view[0];
    int found = 1;
    for (const std::size_t r : view) {
      if (same(r, first)) continue;
      if (found == 1) {
        second = r;
        found = 2;
      } else if (!same(r, second)) {
        return 3;
      }
    }
    return found;
  }

  // --- leaf / split emission -------------------------------------------

  std::size_t make_leaf(std::size_t begin, std::size_t end,
                        const std::vector<int>& counts, StopReason why) {
    const std::size_t id = tree_.nodes.size();
    TreeNode node;
    node.label = static_cast<std::int16_t>(leaf_label(counts, ancestors_));
    node.stop = why;
    node.n_train = static_cast<std::int32_t>(end - begin);
    tree_.nodes.push_back(node);
    if (leaf_of_row_ != nullptr)
      for (std::size_t i = begin; i < end; ++i)
        (*leaf_of_row_)[static_cast<std::size_t>(pos_[i])] =
            static_cast<std::int32_t>(id);
    return id;
  }

  // Stable partition of [begin, end) by projection <= threshold, keeping
  // idx_ and pos_ aligned. Returns the left-side count.
  std::size_t partition(std::size_t begin, std::size_t end,
                        const TreeNode& node) {
    part_idx_.clear();
    part_pos_.clear();
    std::size_t nl = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double* row = x_.row(static_cast<std::size_t>(idx_[i]));
      if (tree_.project(node, row) <= node.threshold) {
        idx_[begin + nl] = idx_[i];
        pos_[begin + nl] = pos_[i];
        ++nl;
      } else {
        part_idx_.push_back(idx_[i]);
        part_pos_.push_back(pos_[i]);
      }
    }
    std::copy(part_idx_.begin(), part_idx_.end(), idx_.begin() + begin + nl);
    std::copy(part_pos_.begin(), part_pos_.end(), pos_.begin() + begin + nl);
    return nl;
  }

  std::size_t grow(std::size_t begin, std::size_t end, std::vector<int> avail);

  // --- state -------------------------------------------------------------

  const Matrix& x_;
  std::span<const int> labels_;
  const std::size_t n_classes_;
  const FeatureLayout& features_;
  const GrowConfig& cfg_;
  Rng& rng_;
  std::vector<std::int32_t>* leaf_of_row_;

  Tree tree_;
  std::vector<int> idx_;
  std::vector<std::int32_t> pos_;
  std::vector<std::vector<int>> ancestors_;

  // scratch, reused across nodes (a node is done with these before recursing)
  std::vector<double> m_node_;
  std::vector<int> labels_node_;
  std::vector<std::size_t> view_;
  ColMat cca_w_, cca_v_;
  std::vector<double> proj_weights_;
  std::vector<double> u_store_;
  std::vector<const double*> u_cols_;
  std::vector<int> part_idx_;
  std::vector<std::int32_t> part_pos_;
  SplitScratch split_scratch_;
};

std::size_t TreeGrower::grow(std::size_t begin, std::size_t end,
                             std::vector<int> avail) {
  assert(end > begin);
  const std::size_t n = end - begin;
  std::vector<int> counts;
  node_counts(begin, end, counts);

  // (1) feature subsampling, resampling away variation-free features
  const std::vector<int> delta = sample_features(begin, end, avail);
  if (delta.empty()) return make_leaf(begin, end, counts, StopReason::kNoFeatures);
  const std::vector<std::uint32_t> cols = encoded_cols(delta);
  const std::size_t g = cols.size();
  gather_node(begin, end, cols);

  // (2) the node-level bootstrap behind the projection bootstrap
  view_.resize(n);
  bool using_bootstrap = false;
  if (cfg_.projection_bootstrap && !cfg_.axis_aligned) {
    for (std::size_t i = 0; i < n; ++i)
      view_[i] = static_cast<std::size_t>(rng_.below(n));
    using_bootstrap = true;
  } else {
    for (std::size_t i = 0; i < n; ++i) view_[i] = i;
  }

  // Degeneracy ladder: a degenerate sample falls back to the node's full
  // data; if that is degenerate too (or the caller asked for it), leaf.
  bool degenerate = rows_identical(view_, g) || single_class(view_);
  if (degenerate && using_bootstrap && !cfg_.leaf_on_degenerate) {
    for (std::size_t i = 0; i < n; ++i) view_[i] = i;
    using_bootstrap = false;
    degenerate = rows_identical(view_, g) || single_class(view_);
  }
  if (degenerate) {
    int n_present = 0;
    for (const int c : counts)
      if (c > 0) ++n_present;
    return make_leaf(begin, end, counts,
                     n_present <= 1 ? StopReason::kPure
                                    : StopReason::kDegenerate);
  }

  TreeNode node;
  node.n_train = static_cast<std::int32_t>(n);

  std::size_t uniq_a = 0, uniq_b = 0;
  const int n_unique = cfg_.axis_aligned
                           ? 3
                           : count_unique_rows(view_, g, uniq_a, uniq_b);
  if (n_unique == 2) {
    // Two distinct points: the projection is their difference and the
    // threshold the midpoint of the two projections, no CCA involved.
    node.phi_begin = static_cast<std::uint32_t>(tree_.phi_cols.size());
    const double* ra = m_node_.data() + uniq_a * g;
    const double* rb = m_node_.data() + uniq_b * g;
    for (std::size_t c = 0; c < g; ++c) {
      const double w = rb[c] - ra[c];
      if (w != 0.0) {
        tree_.phi_cols.push_back(cols[c]);
        tree_.phi_weights.push_back(w);
      }
    }
    node.phi_end = static_cast<std::uint32_t>(tree_.phi_cols.size());
    // Midpoint through the routing projection so the partition below and
    // later routing agree exactly.
    const double* full_a = x_.row(static_cast<std::size_t>(idx_[begin + uniq_a]));
    const double* full_b = x_.row(static_cast<std::size_t>(idx_[begin + uniq_b]));
    node.threshold =
        0.5 * (tree_.project(node, full_a) + tree_.project(node, full_b));
  } else {
    // Projection step: CCA between the (bootstrap) sample and its class
    // indicators for oblique trees, or the identity for axis-aligned ones.
    std::size_t n_proj = 0;
    if (cfg_.axis_aligned) {
      n_proj = g;
      u_store_.resize(n * g);
      for (std::size_t c = 0; c < g; ++c) {
        double* dst = u_store_.data() + c * n;
        for (std::size_t i = 0; i < n; ++i) dst[i] = m_node_[i * g + c];
      }
    } else {
      const std::size_t nb = view_.size();
      cca_w_.resize(nb, g);
      cca_v_.resize(nb, n_classes_);
      for (std::size_t i = 0; i < nb; ++i) {
        const double* row = m_node_.data() + view_[i] * g;
        for (std::size_t c = 0; c < g; ++c) cca_w_(i, c) = row[c];
        cca_v_(i, static_cast<std::size_t>(labels_node_[view_[i]])) = 1.0;
      }
      const CcaResult cca = cca_stable(cca_w_, cca_v_, cfg_.cca);
      n_proj = cca.n_pairs();
      if (n_proj == 0)
        return make_leaf(begin, end, counts, StopReason::kNoProjection);
      // Project the FULL node data, not the bootstrap sample: split points
      // are chosen on everything the node holds.
      u_store_.resize(n * n_proj);
      for (std::size_t c = 0; c < n_proj; ++c) {
        double* dst = u_store_.data() + c * n;
        const double* acol = cca.a.col(c);
        for (std::size_t i = 0; i < n; ++i)
          dst[i] = kern::dot(m_node_.data() + i * g, acol, g);
      }
      proj_weights_.assign(cca.a.col(0), cca.a.col(0) + g * n_proj);
    }

    u_cols_.resize(n_proj);
    for (std::size_t c = 0; c < n_proj; ++c)
      u_cols_[c] = u_store_.data() + c * n;

    const std::optional<SplitCandidate> cand =
        find_best_split(u_cols_, n, labels_node_, n_classes_, cfg_.criterion,
                        split_scratch_);
    if (!cand || cand->gain <= 0.0)
      return make_leaf(begin, end, counts, StopReason::kNoGain);

    node.threshold = cand->threshold;
    node.phi_begin = static_cast<std::uint32_t>(tree_.phi_cols.size());
    if (cfg_.axis_aligned) {
      tree_.phi_cols.push_back(cols[cand->proj_index]);
      tree_.phi_weights.push_back(1.0);
    } else {
      const double* acol = proj_weights_.data() + cand->proj_index * g;
      for (std::size_t c = 0; c < g; ++c) {
        if (acol[c] != 0.0) {
          tree_.phi_cols.push_back(cols[c]);
          tree_.phi_weights.push_back(acol[c]);
        }
      }
    }
    node.phi_end = static_cast<std::uint32_t>(tree_.phi_cols.size());
    if (node.phi_end == node.phi_begin)
      return make_leaf(begin, end, counts, StopReason::kNumeric);
  }

  const std::size_t node_id = tree_.nodes.size();
  tree_.nodes.push_back(node);

  const std::size_t nl = partition(begin, end, tree_.nodes[node_id]);
  if (nl == 0 || nl == n) {
    // Numerically unroutable threshold; withdraw the split.
    tree_.nodes.pop_back();
    tree_.phi_cols.resize(node.phi_begin);
    tree_.phi_weights.resize(node.phi_begin);
    return make_leaf(begin, end, counts, StopReason::kNumeric);
  }

  ancestors_.push_back(counts);
  const std::size_t left = grow(begin, begin + nl, avail);
  const std::size_t right = grow(begin + nl, end, std::move(avail));
  ancestors_.pop_back();
  tree_.nodes[node_id].left = static_cast<std::int32_t>(left);
  tree_.nodes[node_id].right = static_cast<std::int32_t>(right);
  return node_id;
}

}  // namespace

Tree grow_tree(const Matrix& x, std::span<const int> labels,
               std::size_t n_classes, std::span<const int> rows,
               const FeatureLayout& features, const GrowConfig& cfg, Rng& rng,
               std::vector<std::int32_t>* leaf_of_row) {
  if (rows.empty()) throw std::invalid_argument("grow_tree: empty node");
  if (features.n_features == 0)
    throw std::invalid_argument("grow_tree: no features");
  TreeGrower grower(x, labels, n_classes, features, cfg, rng, leaf_of_row);
  return grower.run(rows);
}

}  // namespace ccf
