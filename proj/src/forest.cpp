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

#include "ccf/forest.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace ccf {

const char* forest_mode_name(ForestMode mode) {
  switch (mode) {
    case ForestMode::kCcf: return "ccf";
    case ForestMode::kCcfBag: return "ccf-bag";
    case ForestMode::kRf: return "rf";
  }
  return "?";
}

ForestMode forest_mode_from_name(const std::string& name) {
  if (name == "ccf") return ForestMode::kCcf;
  if (name == "ccf-bag" || name == "ccf_bag") return ForestMode::kCcfBag;
  if (name == "rf") return ForestMode::kRf;
  throw std::runtime_error("unknown forest mode '" + name +
                           "' (expected ccf, ccf-bag or rf)");
}

std::size_t default_lambda(std::size_t n_features) {
  if (n_features == 0) return 1;
  if (n_features == 3) return 2;  // keeps subspacing and CCA both active
  const double raw = std::ceil(std::log2(static_cast<double>(n_features)) + 1.0);
  const auto lambda = static_cast<std::size_t>(raw);
  return std::min(std::max<std::size_t>(lambda, 1), n_features);
}

namespace {

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CCF_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void audit_tree(const Tree& tree, const Matrix& x, std::span<const int> rows,
                const std::vector<std::int32_t>& leaf_of_row,
                bool axis_aligned) {
  std::vector<int> reached(tree.nodes.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t leaf =
        tree.route_to_leaf(x.row(static_cast<std::size_t>(rows[i])));
    if (static_cast<std::int32_t>(leaf) != leaf_of_row[i])
      throw std::logic_error(
          "tree audit: routing disagrees with the training partition");
    ++reached[leaf];
  }
  for (std::size_t j = 0; j < tree.nodes.size(); ++j) {
    const TreeNode& node = tree.nodes[j];
    if (node.is_leaf()) {
      if (node.n_train < 1)
        throw std::logic_error("tree audit: leaf without training rows");
      if (node.stop == StopReason::kNotLeaf)
        throw std::logic_error("tree audit: leaf without a stop reason");
      if (reached[j] != node.n_train)
        throw std::logic_error("tree audit: leaf coverage mismatch");
    } else {
      const TreeNode& l = tree.nodes[static_cast<std::size_t>(node.left)];
      const TreeNode& r = tree.nodes[static_cast<std::size_t>(node.right)];
      if (l.n_train + r.n_train != node.n_train)
        throw std::logic_error("tree audit: child counts do not partition");
      if (l.n_train < 1 || r.n_train < 1)
        throw std::logic_error("tree audit: empty side of a split");
      if (axis_aligned && node.phi_end - node.phi_begin != 1)
        throw std::logic_error("tree audit: axis-aligned split not axis-aligned");
      if (node.phi_end == node.phi_begin)
        throw std::logic_error("tree audit: split with empty projection");
    }
  }
}

}  // namespace

Forest train(const Dataset& ds, const ForestConfig& cfg) {
  if (ds.n_rows() < 2)
    throw std::runtime_error("train: need at least two rows");
  if (cfg.n_trees < 1) throw std::runtime_error("train: need at least one tree");
  {
    int first = -1;
    bool multi = false;
    for (const int y : ds.labels) {
      if (y < 0) throw std::runtime_error("train: unlabeled row");
      if (first < 0) first = y;
      if (y != first) multi = true;
    }
    if (!multi)
      throw std::runtime_error("train: single-class training set, nothing to learn");
  }
  const std::size_t d_logical = ds.n_features();
  std::size_t lambda = cfg.lambda == 0 ? default_lambda(d_logical) : cfg.lambda;
  if (lambda < 1 || lambda > d_logical)
    throw std::runtime_error("train: lambda must lie in [1, " +
                             std::to_string(d_logical) + "]");

  Forest forest;
  forest.schema = ds.schema;
  forest.groups = ds.groups;
  forest.config = cfg;
  forest.lambda_used = lambda;
  std::tie(forest.col_min, forest.col_max) = ds.column_ranges();

  // Fit the z-score statistics, then grow on the standardized copy.
  forest.standardizer = Standardizer::fit(ds);
  Dataset std_ds = ds;
  forest.standardizer.apply(std_ds);

  // Projection bootstrap applies when the subspace does not span everything;
  // otherwise plain bagging takes over (also the ccf-bag and rf behaviour).
  const bool subspacing = lambda < d_logical;
  const bool node_bootstrap = cfg.mode == ForestMode::kCcf && subspacing;
  forest.per_tree_bagging = !node_bootstrap;

  GrowConfig grow_cfg;
  grow_cfg.lambda = lambda;
  grow_cfg.projection_bootstrap = node_bootstrap;
  grow_cfg.axis_aligned = cfg.mode == ForestMode::kRf;
  grow_cfg.leaf_on_degenerate = cfg.leaf_on_degenerate;
  grow_cfg.criterion = cfg.criterion;
  grow_cfg.cca.epsilon = cfg.epsilon;

  FeatureLayout layout;
  std::vector<std::uint32_t> gb(ds.groups.size()), ge(ds.groups.size());
  for (std::size_t f = 0; f < ds.groups.size(); ++f) {
    gb[f] = ds.groups[f].col_begin;
    ge[f] = ds.groups[f].col_end;
  }
  layout.group_begin = gb.data();
  layout.group_end = ge.data();
  layout.n_features = ds.groups.size();

  const std::size_t n = std_ds.n_rows();
  forest.trees.resize(cfg.n_trees);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    std::vector<int> rows;
    std::vector<std::int32_t> leaf_of_row;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.n_trees || failed.load()) break;
      try {
        // Per-tree stream; consumption order is the bag sample first, then
        // everything growth draws.
        Rng rng = Rng::stream(cfg.seed, i);
        rows.resize(n);
        if (forest.per_tree_bagging) {
          for (std::size_t r = 0; r < n; ++r)
            rows[r] = static_cast<int>(rng.below(n));
        } else {
          for (std::size_t r = 0; r < n; ++r) rows[r] = static_cast<int>(r);
        }
        forest.trees[i] = grow_tree(std_ds.x, std_ds.labels, ds.n_classes(),
                                    rows, layout, grow_cfg, rng,
                                    cfg.audit ? &leaf_of_row : nullptr);
        if (cfg.audit)
          audit_tree(forest.trees[i], std_ds.x, rows, leaf_of_row,
                     grow_cfg.axis_aligned);
      } catch (const std::exception& e) {
        bool expected = false;
        if (failed.compare_exchange_strong(expected, true)) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          first_error = "tree " + std::to_string(i) + ": " + e.what();
        }
        break;
      }
    }
  };

  const std::size_t n_threads =
      std::min(resolve_threads(cfg.n_threads), cfg.n_trees);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("train: " + first_error);
  return forest;
}

ClassDistribution Forest::predict_proba_standardized(const double* x) const {
  return predict_proba_standardized_prefix(x, trees.size());
}

ClassDistribution Forest::predict_proba_standardized_prefix(
    const double* x, std::size_t n_trees) const {
  std::vector<int> votes(n_classes(), 0);
  for (std::size_t i = 0; i < n_trees; ++i) ++votes[trees[i].route(x)];
  ClassDistribution dist;
  dist.fractions.resize(votes.size());
  for (std::size_t k = 0; k < votes.size(); ++k)
    dist.fractions[k] =
        static_cast<double>(votes[k]) / static_cast<double>(n_trees);
  return dist;
}

ClassDistribution Forest::predict_proba(const double* raw_values,
                                        const std::uint8_t* missing_flags) const {
  std::vector<double> x(raw_values, raw_values + n_encoded_cols());
  standardizer.apply_row(x.data(), missing_flags, x.size());
  return predict_proba_standardized(x.data());
}

int Forest::predict(const double* raw_values,
                    const std::uint8_t* missing_flags) const {
  return predict_proba(raw_values, missing_flags).argmax();
}

ClassDistribution Forest::predict_proba_fields(
    const std::vector<std::string>& fields) const {
  std::vector<double> values;
  std::vector<std::uint8_t> miss;
  int label = -1;
  encode_row_frozen(schema, groups, fields, 0, values, miss, label);
  return predict_proba(values.data(), miss.data());
}

std::vector<int> predict_dataset(const Forest& forest, const Dataset& ds) {
  if (ds.n_cols() != forest.n_encoded_cols())
    throw std::runtime_error("predict: dataset layout does not match the model");
  std::vector<int> out(ds.n_rows());
  std::vector<double> x(ds.n_cols());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    std::copy(ds.x.row(r), ds.x.row(r) + ds.n_cols(), x.begin());
    forest.standardizer.apply_row(x.data(), ds.missing_row(r), x.size());
    out[r] = forest.predict_proba_standardized(x.data()).argmax();
  }
  return out;
}

}  // namespace ccf
