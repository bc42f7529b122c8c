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

#include <cmath>
#include <numbers>

#include "ccf/dataset.hpp"
#include "ccf/synth.hpp"
#include "doctest.h"

using ccf::Dataset;

namespace {

Dataset iris() {
  static const Dataset ds =
      ccf::load_csv("data/iris.csv", ccf::Schema::parse_file("data/iris.schema"));
  return ds;
}

double sample_corr(const Dataset& ds, std::size_t a, std::size_t b) {
  const std::size_t n = ds.n_rows();
  double ma = 0, mb = 0;
  for (std::size_t r = 0; r < n; ++r) {
    ma += ds.x(r, a);
    mb += ds.x(r, b);
  }
  ma /= n;
  mb /= n;
  double saa = 0, sbb = 0, sab = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double da = ds.x(r, a) - ma;
    const double db = ds.x(r, b) - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_SUITE_BEGIN("synth");

TEST_CASE("spirals have the advertised shape and are deterministic") {
  const Dataset ds = ccf::gen_spirals(10000, 3, 0.2, 7);
  CHECK(ds.n_rows() == 10000);
  CHECK(ds.n_cols() == 2);
  CHECK(ds.n_classes() == 3);
  int counts[3] = {0, 0, 0};
  for (const int y : ds.labels) ++counts[y];
  CHECK(std::abs(counts[0] - counts[1]) <= 1);
  CHECK(std::abs(counts[0] - counts[2]) <= 1);

  const Dataset again = ccf::gen_spirals(10000, 3, 0.2, 7);
  CHECK(again.x.storage() == ds.x.storage());
  const Dataset other = ccf::gen_spirals(10000, 3, 0.2, 8);
  CHECK(other.x.storage() != ds.x.storage());
}

TEST_CASE("zero-noise spirals lie exactly on their curve") {
  const Dataset ds = ccf::gen_spirals(600, 3, 0.0, 3);
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const double x = ds.x(r, 0);
    const double y = ds.x(r, 1);
    const double radius = std::hypot(x, y);
    // radius equals the curve parameter; the angle must match it up to the
    // class rotation
    const double rot = 2.0 * std::numbers::pi * ds.labels[r] / 3.0;
    CHECK(std::abs(radius * std::cos(radius + rot) - x) < 1e-9);
    CHECK(std::abs(radius * std::sin(radius + rot) - y) < 1e-9);
  }
}

TEST_CASE("corr_augment: shape, kappa=0 no-op, large kappa saturates") {
  const Dataset base = ccf::standardized_copy(iris());

  const Dataset zero = ccf::corr_augment(base, {.kappa = 0.0, .seed = 5});
  REQUIRE(zero.n_cols() == base.n_cols() + 1);
  CHECK(zero.n_rows() == base.n_rows());
  for (std::size_t r = 0; r < base.n_rows(); ++r) {
    CHECK(zero.x(r, base.n_cols()) == 0.0);
    for (std::size_t c = 0; c < base.n_cols(); ++c)
      CHECK(zero.x(r, c) == base.x(r, c));
  }

  const Dataset big = ccf::corr_augment(base, {.kappa = 1e4, .seed = 5});
  for (std::size_t c = 0; c < base.n_cols(); ++c)
    CHECK(std::abs(sample_corr(big, c, base.n_cols())) > 0.999);
}

TEST_CASE("make_compound stacks an offset replica with fresh classes") {
  const Dataset ds = iris();
  const Dataset comp = ccf::make_compound(ds, {.kappa = 100.0, .beta = 2000.0}, 11);
  CHECK(comp.n_rows() == 300);
  CHECK(comp.n_classes() == 6);
  CHECK(comp.n_cols() == 5);

  // label blocks never mix
  for (std::size_t r = 0; r < 150; ++r) {
    CHECK(comp.labels[r] < 3);
    CHECK(comp.labels[150 + r] >= 3);
    CHECK(comp.labels[150 + r] == comp.labels[r] + 3);
  }

  // separation: replica columns stay above beta - 6 kappa when kappa << beta
  double min_replica = 1e300;
  for (std::size_t r = 150; r < 300; ++r)
    for (std::size_t c = 0; c < comp.n_cols(); ++c)
      min_replica = std::min(min_replica, comp.x(r, c));
  CHECK(min_replica >= 2000.0 - 6.0 * 100.0);

  // beta = kappa = 0 makes the replica equal to the original block
  const Dataset flat = ccf::make_compound(ds, {.kappa = 0.0, .beta = 0.0}, 11);
  for (std::size_t r = 0; r < 150; ++r)
    for (std::size_t c = 0; c < flat.n_cols(); ++c)
      CHECK(flat.x(r, c) == flat.x(150 + r, c));
}

TEST_CASE("hillvalley curves: shape, balance, determinism") {
  const Dataset ds = ccf::gen_hillvalley(100, 0.0, 9);
  CHECK(ds.n_rows() == 100);
  CHECK(ds.n_cols() == 100);
  CHECK(ds.n_classes() == 2);
  int hills = 0;
  for (const int y : ds.labels)
    if (y == 0) ++hills;
  CHECK(hills == 50);

  const Dataset again = ccf::gen_hillvalley(100, 0.0, 9);
  CHECK(again.x.storage() == ds.x.storage());

  // smooth variant: one clear extremum away from the trend
  for (std::size_t r = 0; r < 5; ++r) {
    double mn = 1e300, mx = -1e300;
    for (std::size_t t = 0; t < 100; ++t) {
      mn = std::min(mn, ds.x(r, t));
      mx = std::max(mx, ds.x(r, t));
    }
    CHECK(mx > mn);  // never a constant curve
  }
}

TEST_SUITE_END();
