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

#include "ccf/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ccf/rng.hpp"

namespace ccf {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(seed ^ (a * 0x9e3779b97f4a7c15ULL)) ^
                    (b * 0xd1b54a32d192ed03ULL));
}

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

double EvalReport::mean_error_pct() const {
  std::vector<double> v;
  v.reserve(folds.size());
  for (const FoldResult& f : folds) v.push_back(f.error_pct);
  return mean_of(v);
}

double EvalReport::std_error_pct() const {
  std::vector<double> v;
  v.reserve(folds.size());
  for (const FoldResult& f : folds) v.push_back(f.error_pct);
  return sample_std(v);
}

double EvalReport::mean_kappa() const {
  std::vector<double> v;
  v.reserve(folds.size());
  for (const FoldResult& f : folds) v.push_back(f.kappa);
  return mean_of(v);
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "repeat,fold,mode,n_trees,error_pct,kappa,train_seconds\n";
  char buf[128];
  for (const FoldResult& f : folds) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%s,%zu,%.6f,%.6f,%.3f\n", f.repeat,
                  f.fold, f.mode.c_str(), f.n_trees, f.error_pct, f.kappa,
                  f.train_seconds);
    out << buf;
  }
  return out.str();
}

std::string EvalReport::predictions_csv() const {
  std::ostringstream out;
  out << "repeat,fold,row,truth,predicted\n";
  for (const PredictionRecord& p : predictions)
    out << p.repeat << ',' << p.fold << ',' << p.row << ',' << p.truth << ','
        << p.predicted << '\n';
  return out.str();
}

double cohen_kappa(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::runtime_error("cohen_kappa: need equal nonempty inputs");
  const std::size_t n = pred.size();
  int max_class = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pred[i] < 0 || truth[i] < 0)
      throw std::runtime_error("cohen_kappa: negative class index");
    max_class = std::max({max_class, pred[i], truth[i]});
  }
  const std::size_t k = static_cast<std::size_t>(max_class) + 1;

  std::vector<double> pred_marg(k, 0.0), truth_marg(k, 0.0);
  double agree = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pred_marg[pred[i]] += 1.0;
    truth_marg[truth[i]] += 1.0;
    if (pred[i] == truth[i]) agree += 1.0;
  }
  const double p_o = agree / static_cast<double>(n);
  double p_e = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    p_e += (pred_marg[c] / n) * (truth_marg[c] / n);
  if (p_e >= 1.0) return 1.0;  // both sides a single identical class
  return (p_o - p_e) / (1.0 - p_e);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a,
                                    std::span<const double> b) {
  if (a.size() != b.size())
    throw std::runtime_error("wilcoxon: need paired samples of equal length");
  std::vector<double> diff;
  diff.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }

  WilcoxonResult res;
  res.n_used = diff.size();
  if (diff.empty()) return res;  // all differences zero: p = 1

  const std::size_t n = diff.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&diff](std::size_t i, std::size_t j) {
    return std::abs(diff[i]) < std::abs(diff[j]);
  });

  // Average ranks over ties; doubling keeps them integral for the exact DP.
  std::vector<double> rank(n, 0.0);
  double tie_correction = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::abs(diff[order[j + 1]]) == std::abs(diff[order[i]]))
      ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    const double tcount = static_cast<double>(j - i + 1);
    tie_correction += tcount * tcount * tcount - tcount;
    i = j + 1;
  }

  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (diff[i] > 0.0) w_plus += rank[i];
  res.w_plus = w_plus;

  if (n <= 25) {
    // Exact null distribution over sign assignments, on doubled ranks.
    std::vector<long long> r2(n);
    long long total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r2[i] = std::llround(2.0 * rank[i]);
      total2 += r2[i];
    }
    std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
    count[0] = 1.0;
    long long reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      reach += r2[i];
      for (long long s = reach; s >= r2[i]; --s)
        count[static_cast<std::size_t>(s)] +=
            count[static_cast<std::size_t>(s - r2[i])];
    }
    const double denom = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    const long long w2 = std::llround(2.0 * w_plus);
    double p_ge = 0.0, p_le = 0.0;
    for (long long s = 0; s <= total2; ++s) {
      const double c = count[static_cast<std::size_t>(s)];
      if (s >= w2) p_ge += c;
      if (s <= w2) p_le += c;
    }
    p_ge /= denom;
    p_le /= denom;
    res.exact = true;
    res.p_greater = std::min(1.0, p_ge);
    res.p_two_sided = std::min(1.0, 2.0 * std::min(p_ge, p_le));
  } else {
    const double dn = static_cast<double>(n);
    const double mu = dn * (dn + 1.0) / 4.0;
    const double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 -
                       tie_correction / 48.0;
    const double sd = std::sqrt(var);
    const double p_ge = 1.0 - phi_cdf((w_plus - mu - 0.5) / sd);
    const double p_le = phi_cdf((w_plus - mu + 0.5) / sd);
    res.exact = false;
    res.p_greater = std::min(1.0, p_ge);
    res.p_two_sided = std::min(1.0, 2.0 * std::min(p_ge, p_le));
  }
  return res;
}

namespace {

struct FoldRun {
  Dataset train_ds;
  Dataset test_ds;
  const std::vector<int>* test_rows = nullptr;
};

FoldRun split_fold(const Dataset& ds, const FoldSplit& fold, bool inverted) {
  FoldRun run;
  if (inverted) {
    run.train_ds = ds.subset(fold.test);   // train on the single fold
    run.test_ds = ds.subset(fold.train);   // test on the remaining folds
    run.test_rows = &fold.train;
  } else {
    run.train_ds = ds.subset(fold.train);
    run.test_ds = ds.subset(fold.test);
    run.test_rows = &fold.test;
  }
  return run;
}

}  // namespace

EvalReport cross_validate(const Dataset& ds, const ForestConfig& cfg,
                          const CrossValOptions& opt) {
  if (opt.folds < 2) throw std::runtime_error("cross_validate: folds >= 2");
  EvalReport report;
  for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
    const std::vector<FoldSplit> folds =
        make_folds(ds, opt.folds, mix_seed(opt.seed, rep, 0xf01d), opt.stratified);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      try {
        const FoldRun run = split_fold(ds, folds[f], opt.inverted);
        ForestConfig fold_cfg = cfg;
        fold_cfg.seed = mix_seed(cfg.seed, rep, f);
        const auto t0 = std::chrono::steady_clock::now();
        const Forest forest = train(run.train_ds, fold_cfg);
        const auto t1 = std::chrono::steady_clock::now();

        const std::vector<int> pred = predict_dataset(forest, run.test_ds);
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
          if (pred[i] != run.test_ds.labels[i]) ++wrong;
        if (opt.keep_predictions) {
          for (std::size_t i = 0; i < pred.size(); ++i)
            report.predictions.push_back({rep, f, (*run.test_rows)[i],
                                          run.test_ds.labels[i], pred[i]});
        }

        FoldResult fr;
        fr.repeat = rep;
        fr.fold = f;
        fr.mode = forest_mode_name(cfg.mode);
        fr.n_trees = cfg.n_trees;
        fr.error_pct = 100.0 * static_cast<double>(wrong) /
                       static_cast<double>(pred.size());
        fr.kappa = cohen_kappa(pred, run.test_ds.labels);
        fr.train_seconds =
            std::chrono::duration<double>(t1 - t0).count();
        report.folds.push_back(std::move(fr));
      } catch (const std::exception& e) {
        throw std::runtime_error("cross_validate: repeat " +
                                 std::to_string(rep) + ", fold " +
                                 std::to_string(f) + ": " + e.what());
      }
    }
  }
  return report;
}

SweepResult ensemble_size_sweep(const Dataset& ds, const ForestConfig& cfg,
                                std::vector<std::size_t> sizes,
                                const CrossValOptions& opt) {
  if (sizes.empty()) throw std::runtime_error("sweep: no sizes");
  std::sort(sizes.begin(), sizes.end());
  if (sizes.front() < 1)
    throw std::runtime_error("sweep: ensemble sizes must be >= 1");
  const std::size_t max_trees = sizes.back();

  SweepResult out;
  out.sizes = sizes;
  out.mean_error_pct.assign(sizes.size(), 0.0);
  std::size_t n_runs = 0;

  for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
    const std::vector<FoldSplit> folds =
        make_folds(ds, opt.folds, mix_seed(opt.seed, rep, 0xf01d), opt.stratified);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const FoldRun run = split_fold(ds, folds[f], opt.inverted);
      ForestConfig fold_cfg = cfg;
      fold_cfg.n_trees = max_trees;
      fold_cfg.seed = mix_seed(cfg.seed, rep, f);
      const Forest forest = train(run.train_ds, fold_cfg);

      // One pass per tree over the test rows, accumulating votes; each size
      // checkpoint reuses the same per-tree predictions.
      const Dataset& test = run.test_ds;
      const std::size_t n_test = test.n_rows();
      Matrix x_std = test.x;
      for (std::size_t r = 0; r < n_test; ++r)
        forest.standardizer.apply_row(x_std.row(r), test.missing_row(r),
                                      x_std.cols());
      std::vector<int> votes(n_test * forest.n_classes(), 0);
      std::size_t size_idx = 0;
      for (std::size_t t = 0; t < max_trees; ++t) {
        for (std::size_t r = 0; r < n_test; ++r)
          ++votes[r * forest.n_classes() +
                  static_cast<std::size_t>(forest.trees[t].route(x_std.row(r)))];
        while (size_idx < sizes.size() && sizes[size_idx] == t + 1) {
          std::size_t wrong = 0;
          for (std::size_t r = 0; r < n_test; ++r) {
            const int* v = votes.data() + r * forest.n_classes();
            int best = 0;
            for (std::size_t k = 1; k < forest.n_classes(); ++k)
              if (v[k] > v[best]) best = static_cast<int>(k);
            if (best != test.labels[r]) ++wrong;
          }
          out.mean_error_pct[size_idx] +=
              100.0 * static_cast<double>(wrong) / static_cast<double>(n_test);
          ++size_idx;
        }
      }
      ++n_runs;
    }
  }
  for (double& e : out.mean_error_pct) e /= static_cast<double>(n_runs);
  return out;
}

}  // namespace ccf
