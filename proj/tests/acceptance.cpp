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

// Acceptance suite: one benchmark criterion per numbered check, each printing
// a single PASS/FAIL line. Run with no arguments for all criteria or with a
// number (1-10) for one. Real-data criteria need the UCI files fetched by
// tools/fetch_uci.sh and fail with instructions when they are absent.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ccf/cca.hpp"
#include "ccf/dataset.hpp"
#include "ccf/eval.hpp"
#include "ccf/forest.hpp"
#include "ccf/linalg.hpp"
#include "ccf/model_io.hpp"
#include "ccf/rng.hpp"
#include "ccf/synth.hpp"

namespace {

using ccf::ColMat;
using ccf::CrossValOptions;
using ccf::Dataset;
using ccf::EvalReport;
using ccf::ForestConfig;
using ccf::ForestMode;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Dataset load_iris() {
  return ccf::load_csv("data/iris.csv",
                       ccf::Schema::parse_file("data/iris.schema"));
}

bool have_file(const char* path) { return std::filesystem::exists(path); }

ForestConfig base_config(ForestMode mode, std::size_t trees,
                         std::uint64_t seed, bool audit = true) {
  ForestConfig cfg;
  cfg.mode = mode;
  cfg.n_trees = trees;
  cfg.seed = seed;
  cfg.audit = audit;  // every tree re-checks partition / coverage invariants
  return cfg;
}

EvalReport run_cv(const Dataset& ds, ForestMode mode, std::size_t trees,
                  std::size_t folds, std::size_t repeats, std::uint64_t seed,
                  double epsilon = 1e-4) {
  ForestConfig cfg = base_config(mode, trees, seed);
  cfg.epsilon = epsilon;
  CrossValOptions opt;
  opt.folds = folds;
  opt.repeats = repeats;
  opt.seed = seed;
  return ccf::cross_validate(ds, cfg, opt);
}

std::string pct(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f%%", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome criterion1_spirals() {
  const Dataset ds = ccf::gen_spirals(10000, 3, ccf::kSpiralsDefaultNoise, 1);
  const double ccf_err =
      run_cv(ds, ForestMode::kCcf, 200, 10, 1, 1).mean_error_pct();
  const double rf_err =
      run_cv(ds, ForestMode::kRf, 200, 10, 1, 1).mean_error_pct();
  Outcome out;
  out.pass = ccf_err <= 1.0 && rf_err > ccf_err;
  out.detail = "ccf " + pct(ccf_err) + " (need <= 1%), rf " + pct(rf_err) +
               " (need > ccf)";
  return out;
}

Outcome criterion2_banknote() {
  Outcome out;
  if (!have_file("data/banknote.csv")) {
    out.pass = false;
    out.detail =
        "input dataset missing: data/banknote.csv (no network in this "
        "environment; run tools/fetch_uci.sh to download it)";
    return out;
  }
  const Dataset ds = ccf::load_csv(
      "data/banknote.csv", ccf::Schema::parse_file("data/banknote.schema"));
  const double err =
      run_cv(ds, ForestMode::kCcf, 500, 10, 1, 1).mean_error_pct();
  out.pass = err <= 0.3;
  out.detail = "ccf " + pct(err) + " (need <= 0.3%)";
  return out;
}

Outcome criterion3_iris() {
  const Dataset ds = load_iris();
  const double err =
      run_cv(ds, ForestMode::kCcf, 500, 10, 3, 1).mean_error_pct();
  Outcome out;
  out.pass = err >= 0.0 && err <= 6.5;
  out.detail = "ccf " + pct(err) + " (need within [0%, 6.5%])";
  return out;
}

Outcome criterion4_hillvalley() {
  const Dataset ds = ccf::gen_hillvalley(1212, 0.0, 1);
  const double ccf_err =
      run_cv(ds, ForestMode::kCcf, 200, 10, 1, 1).mean_error_pct();
  const double rf_err =
      run_cv(ds, ForestMode::kRf, 200, 10, 1, 1).mean_error_pct();
  Outcome out;
  out.pass = ccf_err <= 2.0 && rf_err >= 25.0 && rf_err - ccf_err >= 20.0;
  out.detail = "ccf " + pct(ccf_err) + " (need <= 2%), rf " + pct(rf_err) +
               " (need >= 25%, gap >= 20)";
  return out;
}

Outcome criterion5_correlation_robustness() {
  const Dataset base = ccf::standardized_copy(load_iris());
  const double kappas[3] = {0.0, 1e2, 1e4};
  double ccf_err[3], rf_err[3];
  for (int ki = 0; ki < 3; ++ki) {
    ccf::CorrParams cp;
    cp.kappa = kappas[ki];
    cp.seed = ccf::splitmix64(0xc0de + static_cast<std::uint64_t>(ki));
    const Dataset aug = ccf::corr_augment(base, cp);
    ccf_err[ki] = run_cv(aug, ForestMode::kCcf, 500, 10, 5, 1, 1e-12)
                      .mean_error_pct();
    rf_err[ki] =
        run_cv(aug, ForestMode::kRf, 500, 10, 5, 1, 1e-12).mean_error_pct();
  }
  const double ccf_spread = *std::max_element(ccf_err, ccf_err + 3) -
                            *std::min_element(ccf_err, ccf_err + 3);
  const double rf_degradation = rf_err[2] - rf_err[0];
  Outcome out;
  out.pass = ccf_spread < 3.0 && rf_degradation >= 15.0;
  std::ostringstream ss;
  ss << "ccf " << pct(ccf_err[0]) << "/" << pct(ccf_err[1]) << "/"
     << pct(ccf_err[2]) << " spread " << pct(ccf_spread)
     << " (need < 3 points); rf " << pct(rf_err[0]) << " -> " << pct(rf_err[2])
     << " degradation " << pct(rf_degradation) << " (need >= 15 points)";
  out.detail = ss.str();
  return out;
}

Outcome criterion6_compound_iris() {
  const Dataset comp =
      ccf::make_compound(load_iris(), {.kappa = 100.0, .beta = 2000.0}, 1);
  const double ccf_err =
      run_cv(comp, ForestMode::kCcf, 500, 10, 1, 1).mean_error_pct();
  const double rf_err =
      run_cv(comp, ForestMode::kRf, 500, 10, 1, 1).mean_error_pct();
  Outcome out;
  out.pass = ccf_err <= 10.0 && rf_err >= 50.0;
  out.detail = "ccf " + pct(ccf_err) + " (need <= 10%), rf " + pct(rf_err) +
               " (need >= 50%)";
  return out;
}

Outcome criterion7_ensemble_size() {
  const Dataset ds = ccf::gen_spirals(10000, 3, ccf::kSpiralsDefaultNoise, 1);
  const std::vector<std::size_t> sizes{1, 5, 15, 50, 200};
  std::vector<double> ccf_err(sizes.size(), 0.0);
  double rf500 = 0.0;
  const int n_seeds = 10;
  for (int s = 0; s < n_seeds; ++s) {
    CrossValOptions opt;
    opt.folds = 2;  // 50/50 holdouts, both directions
    opt.repeats = 1;
    opt.seed = static_cast<std::uint64_t>(s);
    ForestConfig ccf_cfg =
        base_config(ForestMode::kCcf, 200, opt.seed, /*audit=*/false);
    const ccf::SweepResult sweep =
        ccf::ensemble_size_sweep(ds, ccf_cfg, sizes, opt);
    for (std::size_t i = 0; i < sizes.size(); ++i)
      ccf_err[i] += sweep.mean_error_pct[i];
    ForestConfig rf_cfg =
        base_config(ForestMode::kRf, 500, opt.seed, /*audit=*/false);
    rf500 += ccf::ensemble_size_sweep(ds, rf_cfg, {500}, opt).mean_error_pct[0];
  }
  for (double& e : ccf_err) e /= n_seeds;
  rf500 /= n_seeds;

  double best_small = 1e300;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (sizes[i] <= 25) best_small = std::min(best_small, ccf_err[i]);
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    if (ccf_err[i + 1] > ccf_err[i] + 0.3) monotone = false;

  Outcome out;
  out.pass = best_small <= rf500 && monotone;
  std::ostringstream ss;
  ss << "ccf errors";
  for (std::size_t i = 0; i < sizes.size(); ++i)
    ss << " L" << sizes[i] << "=" << pct(ccf_err[i]);
  ss << "; rf500 " << pct(rf500) << "; best ccf with <= 25 trees "
     << pct(best_small) << " (need <= rf500, series non-increasing +-0.3)";
  out.detail = ss.str();
  return out;
}

Outcome criterion8_projection_bootstrap() {
  int wins = 0, datasets = 0;
  std::ostringstream ss;
  auto compare = [&](const char* name, const Dataset& ds) {
    const double ccf_err =
        run_cv(ds, ForestMode::kCcf, 200, 10, 1, 1).mean_error_pct();
    const double bag_err =
        run_cv(ds, ForestMode::kCcfBag, 200, 10, 1, 1).mean_error_pct();
    ++datasets;
    if (ccf_err <= bag_err) ++wins;
    ss << name << " ccf " << pct(ccf_err) << " vs ccf-bag " << pct(bag_err)
       << "; ";
  };
  compare("spirals", ccf::gen_spirals(10000, 3, ccf::kSpiralsDefaultNoise, 1));
  compare("hillvalley-noisy", ccf::gen_hillvalley(1212, 0.01, 2));
  if (have_file("data/letter.csv")) {
    Dataset letter = ccf::load_csv("data/letter.csv",
                                   ccf::Schema::parse_file("data/letter.schema"));
    // subsample 2000 rows for a desk-scale run
    ccf::Rng rng(77);
    std::vector<int> all(letter.n_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    rng.shuffle(all);
    all.resize(2000);
    std::sort(all.begin(), all.end());
    compare("letter-2000", letter.subset(all));
  } else {
    ss << "letter-2000 skipped (data/letter.csv not fetched); ";
  }
  Outcome out;
  out.pass = wins >= 2;
  out.detail = ss.str() + "ccf <= ccf-bag on " + std::to_string(wins) + "/" +
               std::to_string(datasets) + " (need >= 2 of 3)";
  return out;
}

// criterion 9 helpers --------------------------------------------------------

ColMat random_mat(ccf::Rng& rng, std::size_t n, std::size_t d) {
  ColMat m(n, d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = 0; r < n; ++r) m(r, c) = rng.normal();
  return m;
}

ColMat centered(const ColMat& a) {
  ColMat c = a;
  ccf::la::center_columns(c);
  return c;
}

double component_orthonormality_error(const ColMat& w, const ColMat& a) {
  const ColMat wc = centered(w);
  ColMat comps(w.rows(), a.cols());
  for (std::size_t c = 0; c < a.cols(); ++c)
    for (std::size_t r = 0; r < w.rows(); ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < w.cols(); ++k) acc += wc(r, k) * a(k, c);
      comps(r, c) = acc;
    }
  const ColMat g = ccf::la::gram(comps);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

bool cca_result_invariants_hold(const ccf::CcaResult& res, std::size_t d,
                                std::string& why) {
  if (res.n_pairs() != std::min(res.rank_w, res.rank_v)) {
    why = "n_pairs != min(rank_w, rank_v)";
    return false;
  }
  for (std::size_t i = 0; i < res.n_pairs(); ++i) {
    if (!(res.rho[i] >= 0.0 && res.rho[i] <= 1.0 + 1e-10)) {
      why = "rho out of [0, 1]";
      return false;
    }
    if (i + 1 < res.n_pairs() && res.rho[i] + 1e-10 < res.rho[i + 1]) {
      why = "rho not non-increasing";
      return false;
    }
  }
  std::size_t zero_rows = 0;
  for (std::size_t r = 0; r < d; ++r) {
    bool all_zero = true;
    for (std::size_t c = 0; c < res.n_pairs(); ++c)
      if (res.a(r, c) != 0.0) all_zero = false;
    if (all_zero) ++zero_rows;
  }
  if (res.n_pairs() > 0 && zero_rows < d - res.rank_w) {
    why = "pivoted-away rows of A not exactly zero";
    return false;
  }
  return true;
}

Outcome criterion9_cca_properties() {
  ccf::Rng rng(90210);
  const ccf::CcaConfig tight{1e-12};
  int checked = 0;
  double worst_oracle = 0.0, worst_orth = 0.0, worst_affine = 0.0;
  std::string why;

  while (checked < 200) {
    const std::size_t n = 12 + rng.below(39);  // n <= 50
    const std::size_t d = 1 + rng.below(5);
    const std::size_t k = 1 + rng.below(5);
    if (n <= d + k + 2) continue;
    const ColMat w = random_mat(rng, n, d);
    const ColMat v = random_mat(rng, n, k);
    std::vector<double> oracle;
    try {
      oracle = ccf::cca_oracle(w, v);
    } catch (const std::domain_error&) {
      continue;  // not a well-conditioned draw
    }
    const ccf::CcaResult res = ccf::cca_stable(w, v, tight);
    if (res.n_pairs() != std::min(d, k)) {
      return {false, "full-rank input lost pairs"};
    }
    for (std::size_t i = 0; i < res.n_pairs(); ++i)
      worst_oracle = std::max(worst_oracle, std::abs(res.rho[i] - oracle[i]));
    worst_orth = std::max(worst_orth, component_orthonormality_error(w, res.a));
    worst_orth = std::max(worst_orth, component_orthonormality_error(v, res.b));

    if (checked % 10 == 0) {
      // affine map of the first input: invertible G, arbitrary translation
      ColMat g(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          g(i, j) = (i == j ? 1.0 : 0.0) + 0.3 * rng.normal();
      std::vector<double> t(d);
      for (auto& x : t) x = 5.0 * rng.normal();
      ColMat wt(n, d);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          double acc = t[c];
          for (std::size_t j = 0; j < d; ++j) acc += w(r, j) * g(j, c);
          wt(r, c) = acc;
        }
      const ccf::CcaResult res2 = ccf::cca_stable(wt, v, tight);
      if (res2.n_pairs() == res.n_pairs())
        for (std::size_t i = 0; i < res.n_pairs(); ++i)
          worst_affine =
              std::max(worst_affine, std::abs(res2.rho[i] - res.rho[i]));
      else
        return {false, "affine map changed the number of pairs"};
    }
    ++checked;
  }
  if (worst_oracle >= 1e-8)
    return {false, "oracle disagreement " + std::to_string(worst_oracle)};
  if (worst_orth >= 1e-8)
    return {false, "component orthonormality error " + std::to_string(worst_orth)};
  if (worst_affine >= 1e-6)
    return {false, "affine variance " + std::to_string(worst_affine)};

  // Rank-deficient robustness: duplicated columns, constants, n < d.
  for (int it = 0; it < 50; ++it) {
    const std::size_t n = 4 + rng.below(12);
    const std::size_t d = 2 + rng.below(8);  // may exceed n
    ColMat w = random_mat(rng, n, d);
    if (d >= 2) {
      for (std::size_t r = 0; r < n; ++r) w(r, d - 1) = w(r, 0);  // duplicate
      for (std::size_t r = 0; r < n; ++r) w(r, d / 2) = 3.25;     // constant
    }
    const ColMat v = random_mat(rng, n, 1 + rng.below(3));
    ccf::CcaResult res;
    try {
      res = ccf::cca_stable(w, v);  // default epsilon
    } catch (const std::exception& e) {
      return {false, std::string("rank-deficient input aborted: ") + e.what()};
    }
    if (!cca_result_invariants_hold(res, d, why))
      return {false, "rank-deficient invariants: " + why};
    if (res.n_pairs() > 0) {
      const double orth = component_orthonormality_error(w, res.a);
      if (orth >= 1e-8)
        return {false, "rank-deficient orthonormality " + std::to_string(orth)};
    }
  }

  Outcome out;
  out.pass = true;
  std::ostringstream ss;
  ss << "200 instances: |rho - oracle| max " << worst_oracle
     << ", orthonormality max " << worst_orth << ", affine drift max "
     << worst_affine << "; 50 rank-deficient inputs clean";
  out.detail = ss.str();
  return out;
}

Outcome criterion10_structural() {
  // Criteria 1-6 already train every forest with auditing enabled (leaf
  // coverage, partition counts, axis alignment). This criterion re-runs the
  // audit across all modes on fresh desk-scale forests and pins the
  // serialization and determinism contracts.
  const Dataset spirals = ccf::gen_spirals(2000, 3, ccf::kSpiralsDefaultNoise, 3);
  const Dataset hv = ccf::gen_hillvalley(400, 0.01, 4);
  const Dataset iris = load_iris();
  const Dataset compound =
      ccf::make_compound(iris, {.kappa = 100.0, .beta = 2000.0}, 5);

  struct Job {
    const Dataset* ds;
    ForestMode mode;
    std::size_t trees;
  };
  const Job jobs[] = {
      {&spirals, ForestMode::kCcf, 50},  {&spirals, ForestMode::kRf, 50},
      {&spirals, ForestMode::kCcfBag, 50}, {&hv, ForestMode::kCcf, 30},
      {&hv, ForestMode::kRf, 30},        {&iris, ForestMode::kCcf, 100},
      {&compound, ForestMode::kCcf, 50},
  };
  for (const Job& job : jobs) {
    try {
      ccf::train(*job.ds, base_config(job.mode, job.trees, 11));
    } catch (const std::exception& e) {
      return {false, std::string("audit failed: ") + e.what()};
    }
  }

  // Serialization round trip: bytes and predictions are reproduced exactly.
  const ccf::Forest f = ccf::train(spirals, base_config(ForestMode::kCcf, 40, 12));
  const std::string bytes = ccf::serialize_forest(f);
  const ccf::Forest g = ccf::parse_forest(bytes);
  if (ccf::serialize_forest(g) != bytes)
    return {false, "serialize -> parse -> serialize not byte-identical"};
  const std::vector<int> pf = ccf::predict_dataset(f, spirals);
  const std::vector<int> pg = ccf::predict_dataset(g, spirals);
  if (pf != pg) return {false, "round-tripped model predicts differently"};

  // Full-run determinism under a fixed seed.
  const std::string again =
      ccf::serialize_forest(ccf::train(spirals, base_config(ForestMode::kCcf, 40, 12)));
  if (again != bytes) return {false, "same seed produced different model bytes"};
  const Dataset regen = ccf::gen_spirals(2000, 3, ccf::kSpiralsDefaultNoise, 3);
  if (regen.x.storage() != spirals.x.storage())
    return {false, "generator not deterministic"};
  const EvalReport r1 = run_cv(iris, ForestMode::kCcf, 20, 5, 1, 9);
  const EvalReport r2 = run_cv(iris, ForestMode::kCcf, 20, 5, 1, 9);
  for (std::size_t i = 0; i < r1.folds.size(); ++i)
    if (r1.folds[i].error_pct != r2.folds[i].error_pct ||
        r1.folds[i].kappa != r2.folds[i].kappa)
      return {false, "cross-validation not deterministic"};

  Outcome out;
  out.pass = true;
  out.detail =
      "audits green across ccf/rf/ccf-bag on 4 datasets (criteria 1-6 forests "
      "are audited in-run as well); model round trip bit-exact; fixed-seed "
      "reruns identical";
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {1, "spirals 10-fold, 200 trees", criterion1_spirals},
    {2, "banknote 10-fold, 500 trees", criterion2_banknote},
    {3, "iris 3x10-fold, 500 trees", criterion3_iris},
    {4, "hill-valley separation, 200 trees", criterion4_hillvalley},
    {5, "correlation robustness on iris", criterion5_correlation_robustness},
    {6, "compound iris (beta=2000, kappa=100)", criterion6_compound_iris},
    {7, "ensemble-size study on spirals", criterion7_ensemble_size},
    {8, "projection bootstrap vs bagging", criterion8_projection_bootstrap},
    {9, "cca property suite", criterion9_cca_properties},
    {10, "structural invariants and determinism", criterion10_structural},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 10) {
      std::fprintf(stderr, "usage: %s [criterion 1-10]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s — %s\n", out.pass ? "PASS" : "FAIL",
                c.id, c.name, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
