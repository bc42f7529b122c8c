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

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ccf/dataset.hpp"
#include "ccf/forest.hpp"
#include "ccf/model_io.hpp"
#include "ccf/synth.hpp"
#include "doctest.h"

using ccf::Dataset;
using ccf::Forest;
using ccf::ForestConfig;
using ccf::ForestMode;

namespace {

Dataset iris() {
  static const Dataset ds =
      ccf::load_csv("data/iris.csv", ccf::Schema::parse_file("data/iris.schema"));
  return ds;
}

}  // namespace

TEST_SUITE_BEGIN("forest");

TEST_CASE("default lambda rule") {
  CHECK(ccf::default_lambda(2) == 2);
  CHECK(ccf::default_lambda(3) == 2);   // special case
  CHECK(ccf::default_lambda(4) == 3);
  CHECK(ccf::default_lambda(16) == 5);
  CHECK(ccf::default_lambda(100) == 8);
  CHECK(ccf::default_lambda(10304) == 15);
}

TEST_CASE("training on iris fits and predicts sensibly") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.seed = 42;
  cfg.audit = true;
  const Forest f = ccf::train(ds, cfg);
  CHECK(f.lambda_used == 3);  // ceil(log2 4 + 1)
  CHECK(!f.per_tree_bagging);  // lambda < D: projection bootstrap active
  CHECK(f.trees.size() == 25);

  const std::vector<int> pred = ccf::predict_dataset(f, ds);
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < ds.n_rows(); ++r)
    if (pred[r] != ds.labels[r]) ++wrong;
  CHECK(wrong <= 3);  // unpruned forest nearly memorizes its training set
}

TEST_CASE("vote accounting is exact") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 7;
  cfg.seed = 5;
  const Forest f = ccf::train(ds, cfg);

  const double* row = ds.x.row(17);
  const ccf::ClassDistribution dist = f.predict_proba(row, ds.missing_row(17));
  REQUIRE(dist.fractions.size() == 3);
  double sum = 0.0;
  for (const double p : dist.fractions) sum += p;
  CHECK(std::abs(sum - 1.0) <= 1e-12);

  // fractions must equal (votes)/L exactly: recompute votes by routing
  std::vector<double> x(ds.x.row(17), ds.x.row(17) + ds.n_cols());
  f.standardizer.apply_row(x.data(), ds.missing_row(17), x.size());
  std::vector<int> votes(3, 0);
  for (const ccf::Tree& t : f.trees) ++votes[t.route(x.data())];
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(dist.fractions[k] == static_cast<double>(votes[k]) / 7.0);
}

TEST_CASE("single tree gives an indicator distribution") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 1;
  cfg.seed = 9;
  const Forest f = ccf::train(ds, cfg);
  const ccf::ClassDistribution dist =
      f.predict_proba(ds.x.row(3), ds.missing_row(3));
  int ones = 0, zeros = 0;
  for (const double p : dist.fractions) {
    if (p == 1.0) ++ones;
    if (p == 0.0) ++zeros;
  }
  CHECK(ones == 1);
  CHECK(zeros == 2);
}

TEST_CASE("argmax ties resolve to the lowest class index") {
  ccf::ClassDistribution d;
  d.fractions = {0.25, 0.375, 0.375};
  CHECK(d.argmax() == 1);
  d.fractions = {0.5, 0.5};
  CHECK(d.argmax() == 0);
}

TEST_CASE("lambda equal to feature count switches to bagging") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.lambda = 4;  // D = 4
  cfg.seed = 3;
  const Forest f = ccf::train(ds, cfg);
  CHECK(f.per_tree_bagging);

  // and matches the ccf-bag mode with the same seed exactly
  ForestConfig bag = cfg;
  bag.mode = ForestMode::kCcfBag;
  const Forest g = ccf::train(ds, bag);
  REQUIRE(f.trees.size() == g.trees.size());
  for (std::size_t i = 0; i < f.trees.size(); ++i) {
    CHECK(f.trees[i].nodes.size() == g.trees[i].nodes.size());
    CHECK(f.trees[i].phi_weights == g.trees[i].phi_weights);
  }
}

TEST_CASE("rf mode grows axis-aligned trees") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.mode = ForestMode::kRf;
  cfg.seed = 77;
  cfg.audit = true;  // audit enforces single-entry projections
  const Forest f = ccf::train(ds, cfg);
  CHECK(f.per_tree_bagging);
  for (const ccf::Tree& t : f.trees)
    for (const ccf::TreeNode& n : t.nodes)
      if (!n.is_leaf()) {
        CHECK(n.phi_end - n.phi_begin == 1);
        CHECK(t.phi_weights[n.phi_begin] == 1.0);
      }
}

TEST_CASE("training rejects degenerate inputs") {
  Dataset ds = iris();
  for (int& y : ds.labels) y = 0;  // collapse to a single class
  ForestConfig cfg;
  cfg.n_trees = 2;
  CHECK_THROWS_WITH_AS(ccf::train(ds, cfg), doctest::Contains("single-class"),
                       std::runtime_error);

  const Dataset tiny = iris().subset({0});
  CHECK_THROWS_AS(ccf::train(tiny, cfg), std::runtime_error);

  ForestConfig bad = cfg;
  bad.lambda = 99;
  CHECK_THROWS_AS(ccf::train(iris(), bad), std::runtime_error);
}

TEST_CASE("determinism: config + seed pins the model bytes") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 8;
  cfg.seed = 1001;
  const std::string bytes_a = ccf::serialize_forest(ccf::train(ds, cfg));
  const std::string bytes_b = ccf::serialize_forest(ccf::train(ds, cfg));
  CHECK(bytes_a == bytes_b);

  cfg.seed = 1002;
  CHECK(ccf::serialize_forest(ccf::train(ds, cfg)) != bytes_a);
}

TEST_CASE("thread count does not change the result") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 6;
  cfg.seed = 2024;
  cfg.n_threads = 1;
  const std::string serial = ccf::serialize_forest(ccf::train(ds, cfg));
  cfg.n_threads = 4;
  const std::string parallel = ccf::serialize_forest(ccf::train(ds, cfg));
  CHECK(serial == parallel);
}

TEST_CASE("serialization round trip preserves predictions bit for bit") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.seed = 31;
  const Forest f = ccf::train(ds, cfg);

  const std::string text = ccf::serialize_forest(f);
  const Forest g = ccf::parse_forest(text);
  CHECK(ccf::serialize_forest(g) == text);
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const auto pa = f.predict_proba(ds.x.row(r), ds.missing_row(r));
    const auto pb = g.predict_proba(ds.x.row(r), ds.missing_row(r));
    REQUIRE(pa.fractions == pb.fractions);
  }

  ccf::save_forest(f, "build/test_model.ccf");
  const Forest h = ccf::load_forest("build/test_model.ccf");
  CHECK(ccf::serialize_forest(h) == text);
}

TEST_CASE("malformed model files are rejected") {
  CHECK_THROWS_WITH_AS(ccf::parse_forest(""), doctest::Contains("empty"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(ccf::parse_forest("ccf-model/99\nschema\t1\t0\n"),
                       doctest::Contains("ccf-model/99"), std::runtime_error);

  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 2;
  const std::string text = ccf::serialize_forest(ccf::train(ds, cfg));
  const std::string truncated = text.substr(0, text.size() / 2);
  CHECK_THROWS_AS(ccf::parse_forest(truncated), std::runtime_error);
}

TEST_CASE("predicting from raw csv fields goes through the frozen schema") {
  const Dataset ds = iris();
  ForestConfig cfg;
  cfg.n_trees = 15;
  cfg.seed = 8;
  const Forest f = ccf::train(ds, cfg);
  const auto dist =
      f.predict_proba_fields({"5.1", "3.5", "1.4", "0.2", "setosa"});
  CHECK(dist.argmax() == 0);
  // missing cells are allowed at predict time
  const auto dist2 = f.predict_proba_fields({"5.1", "?", "1.4", "", "?"});
  CHECK(dist2.fractions.size() == 3);
}

TEST_SUITE_END();
