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

// ccf: train, apply and benchmark canonical correlation forests from the
// command line. Every subcommand is deterministic given --seed; file outputs
// are written atomically (temp file + rename).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccf/dataset.hpp"
#include "ccf/eval.hpp"
#include "ccf/forest.hpp"
#include "ccf/model_io.hpp"
#include "ccf/rng.hpp"
#include "ccf/synth.hpp"

namespace {

using ccf::Dataset;
using ccf::Forest;
using ccf::ForestConfig;

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void require_file(const std::string& path, const char* what) {
  if (!std::filesystem::exists(path))
    throw std::runtime_error(std::string(what) + " file not found: " + path);
}

Dataset load_dataset(const std::string& data_path,
                     const std::string& schema_path) {
  require_file(schema_path, "schema");
  require_file(data_path, "data");
  return ccf::load_csv(data_path, ccf::Schema::parse_file(schema_path));
}

struct ForestFlags {
  std::size_t trees = 500;
  std::size_t lambda = 0;
  std::string mode = "ccf";
  std::string criterion = "info-gain";
  double epsilon = 1e-4;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool leaf_on_degenerate = false;
  bool audit = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--trees", trees, "Ensemble size")->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", lambda,
                    "Features sampled per node (0 = ceil(log2 D + 1))");
    cmd->add_option("--mode", mode, "ccf, ccf-bag or rf")
        ->check(CLI::IsMember({"ccf", "ccf-bag", "rf"}));
    cmd->add_option("--criterion", criterion, "Split criterion")
        ->check(CLI::IsMember({"info-gain", "gini"}));
    cmd->add_option("--epsilon", epsilon, "CCA rank-reduction tolerance");
    cmd->add_option("--seed", seed, "Random seed");
    cmd->add_option("--threads", threads,
                    "Worker threads (0 = env CCF_THREADS or hardware)");
    cmd->add_flag("--leaf-on-degenerate", leaf_on_degenerate,
                  "Degenerate node samples become leaves instead of falling "
                  "back to the node data");
    cmd->add_flag("--audit", audit,
                  "Verify structural tree invariants while training");
  }

  ForestConfig config() const {
    ForestConfig cfg;
    cfg.n_trees = trees;
    cfg.lambda = lambda;
    cfg.mode = ccf::forest_mode_from_name(mode);
    cfg.criterion = criterion == "gini" ? ccf::SplitCriterion::kGini
                                        : ccf::SplitCriterion::kInfoGain;
    cfg.epsilon = epsilon;
    cfg.seed = seed;
    cfg.n_threads = threads;
    cfg.leaf_on_degenerate = leaf_on_degenerate;
    cfg.audit = audit;
    return cfg;
  }
};

std::string format_double(double v, const char* fmt = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// ---------------------------------------------------------------- train ----

int cmd_train(const std::string& data, const std::string& schema,
              const std::string& out, const ForestFlags& flags) {
  const Dataset ds = load_dataset(data, schema);
  const auto t0 = std::chrono::steady_clock::now();
  const Forest forest = ccf::train(ds, flags.config());
  const auto t1 = std::chrono::steady_clock::now();
  write_atomic(out, ccf::serialize_forest(forest));
  std::printf("trained %zu trees  mode=%s  lambda=%zu  wall=%.2fs  -> %s\n",
              forest.trees.size(), ccf::forest_mode_name(forest.config.mode),
              forest.lambda_used,
              std::chrono::duration<double>(t1 - t0).count(), out.c_str());
  return 0;
}

// -------------------------------------------------------------- predict ----

int cmd_predict(const std::string& model_path, const std::string& data,
                const std::string& out) {
  require_file(model_path, "model");
  require_file(data, "data");
  const Forest forest = ccf::load_forest(model_path);
  const Dataset ds = ccf::load_csv_frozen(data, forest.schema);

  std::ostringstream csv;
  csv << "row,predicted";
  for (const std::string& c : forest.schema.class_names) csv << ",p_" << c;
  csv << '\n';
  std::size_t labeled = 0, wrong = 0;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const ccf::ClassDistribution dist =
        forest.predict_proba(ds.x.row(r), ds.missing_row(r));
    const int pred = dist.argmax();
    csv << r << ','
        << forest.schema.class_names[static_cast<std::size_t>(pred)];
    for (const double p : dist.fractions) csv << ',' << format_double(p);
    csv << '\n';
    if (ds.labels[r] >= 0) {
      ++labeled;
      if (pred != ds.labels[r]) ++wrong;
    }
  }
  if (out.empty()) {
    std::fputs(csv.str().c_str(), stdout);
  } else {
    write_atomic(out, csv.str());
    std::printf("predicted %zu rows -> %s\n", ds.n_rows(), out.c_str());
  }
  if (labeled > 0)
    std::printf("labeled rows: %zu  error: %s%%\n", labeled,
                format_double(100.0 * static_cast<double>(wrong) /
                                  static_cast<double>(labeled),
                              "%.4f")
                    .c_str());
  return 0;
}

// ------------------------------------------------------------- crossval ----

int cmd_crossval(const std::string& data, const std::string& schema,
                 const ForestFlags& flags, std::size_t folds,
                 std::size_t repeats, bool inverted, bool no_stratify,
                 const std::string& out, const std::string& dump_predictions) {
  const Dataset ds = load_dataset(data, schema);
  ccf::CrossValOptions opt;
  opt.folds = folds;
  opt.repeats = repeats;
  opt.inverted = inverted;
  opt.stratified = !no_stratify;
  opt.keep_predictions = !dump_predictions.empty();
  opt.seed = flags.seed;
  const ccf::EvalReport report = ccf::cross_validate(ds, flags.config(), opt);
  if (!out.empty()) write_atomic(out, report.to_csv());
  if (!dump_predictions.empty())
    write_atomic(dump_predictions, report.predictions_csv());
  std::printf("%s  folds=%zu repeats=%zu%s  error=%.4f%% +- %.4f  kappa=%.4f\n",
              flags.mode.c_str(), folds, repeats, inverted ? " inverted" : "",
              report.mean_error_pct(), report.std_error_pct(),
              report.mean_kappa());
  return 0;
}

// ------------------------------------------------------------------ gen ----

void write_dataset(const Dataset& ds, const std::string& prefix) {
  // write_csv writes the whole file itself; keep the atomic contract by
  // writing under a temp name and renaming.
  const std::string tmp_csv = prefix + ".csv.tmp";
  ccf::write_csv(ds, tmp_csv);
  std::filesystem::rename(tmp_csv, prefix + ".csv");
  write_atomic(prefix + ".schema", ds.schema.to_text());
  std::printf("wrote %s.csv (%zu rows, %zu classes) and %s.schema\n",
              prefix.c_str(), ds.n_rows(), ds.n_classes(), prefix.c_str());
}

// ------------------------------------------------------- corr-experiment ----

int cmd_corr_experiment(const std::string& data, const std::string& schema,
                        const ForestFlags& flags,
                        const std::vector<double>& kappas,
                        const std::vector<std::string>& modes,
                        std::size_t folds, std::size_t repeats,
                        const std::string& out) {
  const Dataset ds = load_dataset(data, schema);
  const Dataset base = ccf::standardized_copy(ds);

  std::ostringstream csv;
  csv << "mode,kappa,mean_error_pct,std_error_pct,mean_kappa,folds,repeats\n";
  for (std::size_t ki = 0; ki < kappas.size(); ++ki) {
    ccf::CorrParams cp;
    cp.kappa = kappas[ki];
    cp.seed = ccf::splitmix64(flags.seed ^ (0xabcd0000ULL + ki));
    const Dataset aug = ccf::corr_augment(base, cp);
    for (const std::string& mode : modes) {
      ForestFlags run = flags;
      run.mode = mode;
      ccf::CrossValOptions opt;
      opt.folds = folds;
      opt.repeats = repeats;
      opt.seed = flags.seed;
      const ccf::EvalReport rep = ccf::cross_validate(aug, run.config(), opt);
      csv << mode << ',' << format_double(kappas[ki], "%.9g") << ','
          << format_double(rep.mean_error_pct()) << ','
          << format_double(rep.std_error_pct()) << ','
          << format_double(rep.mean_kappa()) << ',' << folds << ',' << repeats
          << '\n';
      std::printf("kappa=%-10.9g mode=%-7s error=%.4f%% +- %.4f\n", kappas[ki],
                  mode.c_str(), rep.mean_error_pct(), rep.std_error_pct());
    }
  }
  if (!out.empty()) write_atomic(out, csv.str());
  return 0;
}

// --------------------------------------------------------------- surface ----

int cmd_surface(const std::string& model_path, const std::string& out,
                std::size_t grid) {
  require_file(model_path, "model");
  const Forest forest = ccf::load_forest(model_path);
  if (forest.groups.size() != 2 || forest.groups[0].width() != 1 ||
      forest.groups[1].width() != 1)
    throw std::runtime_error(
        "surface: the model must be trained on exactly two ordinal features");

  double lo[2], hi[2];
  for (std::size_t c = 0; c < 2; ++c) {
    lo[c] = forest.col_min[c];
    hi[c] = forest.col_max[c];
    double pad = 0.1 * (hi[c] - lo[c]);
    if (pad <= 0.0) pad = 0.5;
    lo[c] -= pad;
    hi[c] += pad;
  }

  std::ostringstream csv;
  csv << forest.groups[0].name << ',' << forest.groups[1].name;
  for (const std::string& c : forest.schema.class_names) csv << ",p_" << c;
  csv << ",argmax\n";
  const std::uint8_t no_missing[2] = {0, 0};
  const double step = grid > 1 ? static_cast<double>(grid - 1) : 1.0;
  for (std::size_t ix = 0; ix < grid; ++ix) {
    for (std::size_t iy = 0; iy < grid; ++iy) {
      double raw[2];
      raw[0] = lo[0] + (hi[0] - lo[0]) * static_cast<double>(ix) / step;
      raw[1] = lo[1] + (hi[1] - lo[1]) * static_cast<double>(iy) / step;
      const ccf::ClassDistribution dist = forest.predict_proba(raw, no_missing);
      csv << format_double(raw[0], "%.9g") << ','
          << format_double(raw[1], "%.9g");
      for (const double p : dist.fractions) csv << ',' << format_double(p);
      csv << ','
          << forest.schema.class_names[static_cast<std::size_t>(dist.argmax())]
          << '\n';
    }
  }
  write_atomic(out, csv.str());
  std::printf("wrote %zux%zu grid -> %s\n", grid, grid, out.c_str());
  return 0;
}

// ----------------------------------------------------------- sweep-trees ----

int cmd_sweep_trees(const std::string& data, const std::string& schema,
                    const ForestFlags& flags,
                    const std::vector<std::size_t>& sizes,
                    const std::string& ref_mode, std::size_t ref_trees,
                    std::size_t folds, std::size_t repeats,
                    const std::string& out) {
  const Dataset ds = load_dataset(data, schema);
  ccf::CrossValOptions opt;
  opt.folds = folds;
  opt.repeats = repeats;
  opt.seed = flags.seed;

  const ccf::SweepResult sweep =
      ccf::ensemble_size_sweep(ds, flags.config(), sizes, opt);

  double ref_error = -1.0;
  if (ref_trees > 0) {
    ForestFlags ref = flags;
    ref.mode = ref_mode;
    ref.trees = ref_trees;
    const ccf::SweepResult ref_sweep =
        ccf::ensemble_size_sweep(ds, ref.config(), {ref_trees}, opt);
    ref_error = ref_sweep.mean_error_pct[0];
  }

  std::ostringstream csv;
  csv << "n_trees,mode,mean_error_pct,ref_mode,ref_trees,ref_error_pct,"
         "error_ratio\n";
  for (std::size_t i = 0; i < sweep.sizes.size(); ++i) {
    csv << sweep.sizes[i] << ',' << flags.mode << ','
        << format_double(sweep.mean_error_pct[i]);
    if (ref_error >= 0.0) {
      const double ratio =
          ref_error > 0.0 ? sweep.mean_error_pct[i] / ref_error : -1.0;
      csv << ',' << ref_mode << ',' << ref_trees << ','
          << format_double(ref_error) << ',' << format_double(ratio);
    } else {
      csv << ",,,,";
    }
    csv << '\n';
    std::string note;
    if (ref_error > 0.0)
      note = "  (ratio vs " + ref_mode + "-" + std::to_string(ref_trees) +
             ": " + format_double(sweep.mean_error_pct[i] / ref_error, "%.3f") +
             ")";
    std::printf("L=%-6zu error=%.4f%%%s\n", sweep.sizes[i],
                sweep.mean_error_pct[i], note.c_str());
  }
  if (!out.empty()) write_atomic(out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"canonical correlation forests"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a forest on a CSV");
  std::string train_data, train_schema, train_out;
  ForestFlags train_flags;
  train_cmd->add_option("--data", train_data, "Training CSV")->required();
  train_cmd->add_option("--schema", train_schema, "Schema file")->required();
  train_cmd->add_option("--out", train_out, "Model output path")->required();
  train_flags.attach(train_cmd);

  // predict
  auto* predict_cmd =
      app.add_subcommand("predict", "Apply a trained model to a CSV");
  std::string pred_model, pred_data, pred_out;
  predict_cmd->add_option("--model", pred_model, "Model file")->required();
  predict_cmd->add_option("--data", pred_data, "Input CSV")->required();
  predict_cmd->add_option("--out", pred_out, "Prediction CSV (default stdout)");

  // crossval
  auto* cv_cmd =
      app.add_subcommand("crossval", "Repeated k-fold cross-validation");
  std::string cv_data, cv_schema, cv_out, cv_dump;
  ForestFlags cv_flags;
  std::size_t cv_folds = 10, cv_repeats = 1;
  bool cv_inverted = false, cv_no_stratify = false;
  cv_cmd->add_option("--data", cv_data, "Dataset CSV")->required();
  cv_cmd->add_option("--schema", cv_schema, "Schema file")->required();
  cv_cmd->add_option("--folds", cv_folds, "Fold count")
      ->check(CLI::Range(2, 1000000));
  cv_cmd->add_option("--repeats", cv_repeats, "Repetitions")
      ->check(CLI::PositiveNumber);
  cv_cmd->add_flag("--inverted", cv_inverted,
                   "Train on one fold, test on the rest");
  cv_cmd->add_flag("--no-stratify", cv_no_stratify, "Uniform random folds");
  cv_cmd->add_option("--out", cv_out, "Report CSV path");
  cv_cmd->add_option("--dump-predictions", cv_dump,
                     "Per-fold prediction CSV path");
  cv_flags.attach(cv_cmd);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic datasets");
  gen_cmd->require_subcommand(1);

  auto* gen_spirals = gen_cmd->add_subcommand("spirals", "Interleaved spirals");
  std::size_t sp_n = 10000, sp_classes = 3;
  double sp_noise = ccf::kSpiralsDefaultNoise;
  std::uint64_t sp_seed = 0;
  std::string sp_out = "spirals";
  gen_spirals->add_option("--n", sp_n, "Points")->check(CLI::PositiveNumber);
  gen_spirals->add_option("--classes", sp_classes, "Spiral arms")
      ->check(CLI::Range(2, 1000));
  gen_spirals->add_option("--noise", sp_noise, "Gaussian noise std");
  gen_spirals->add_option("--seed", sp_seed, "Random seed");
  gen_spirals->add_option("--out", sp_out, "Output prefix");

  auto* gen_hv = gen_cmd->add_subcommand("hillvalley", "Terrain curves");
  std::size_t hv_n = 1212;
  double hv_noise = 0.0;
  std::uint64_t hv_seed = 0;
  std::string hv_out = "hillvalley";
  gen_hv->add_option("--n", hv_n, "Curves")->check(CLI::PositiveNumber);
  gen_hv->add_option("--noise", hv_noise, "Proportional noise fraction");
  gen_hv->add_option("--seed", hv_seed, "Random seed");
  gen_hv->add_option("--out", hv_out, "Output prefix");

  auto* gen_comp = gen_cmd->add_subcommand(
      "compound", "Correlated replica stacked onto a dataset");
  std::string comp_data, comp_schema, comp_out = "compound";
  double comp_beta = 2000.0, comp_kappa = 100.0;
  std::uint64_t comp_seed = 0;
  gen_comp->add_option("--data", comp_data, "Input CSV")->required();
  gen_comp->add_option("--schema", comp_schema, "Schema file")->required();
  gen_comp->add_option("--beta", comp_beta, "Replica offset");
  gen_comp->add_option("--kappa", comp_kappa, "Injected-feature std");
  gen_comp->add_option("--seed", comp_seed, "Random seed");
  gen_comp->add_option("--out", comp_out, "Output prefix");

  auto* gen_aug = gen_cmd->add_subcommand(
      "augment", "Correlation-inject a standardized dataset");
  std::string aug_data, aug_schema, aug_out = "augmented";
  double aug_kappa = 100.0;
  std::uint64_t aug_seed = 0;
  gen_aug->add_option("--data", aug_data, "Input CSV")->required();
  gen_aug->add_option("--schema", aug_schema, "Schema file")->required();
  gen_aug->add_option("--kappa", aug_kappa, "Injected-feature std");
  gen_aug->add_option("--seed", aug_seed, "Random seed");
  gen_aug->add_option("--out", aug_out, "Output prefix");

  // corr-experiment
  auto* corr_cmd = app.add_subcommand(
      "corr-experiment", "Error versus injected correlation strength");
  std::string corr_data, corr_schema, corr_out;
  ForestFlags corr_flags;
  corr_flags.epsilon = 1e-12;  // keep the tiny true variation through the CCA
  std::vector<double> corr_kappas{0.0, 100.0, 10000.0};
  std::vector<std::string> corr_modes{"ccf", "rf"};
  std::size_t corr_folds = 10, corr_repeats = 5;
  corr_cmd->add_option("--data", corr_data, "Dataset CSV")->required();
  corr_cmd->add_option("--schema", corr_schema, "Schema file")->required();
  corr_cmd->add_option("--kappas", corr_kappas, "Kappa values")->delimiter(',');
  corr_cmd->add_option("--modes", corr_modes, "Forest modes")
      ->delimiter(',')
      ->check(CLI::IsMember({"ccf", "ccf-bag", "rf"}));
  corr_cmd->add_option("--folds", corr_folds, "Fold count");
  corr_cmd->add_option("--repeats", corr_repeats, "Repetitions");
  corr_cmd->add_option("--out", corr_out, "Report CSV path");
  corr_flags.attach(corr_cmd);

  // surface
  auto* surface_cmd = app.add_subcommand(
      "surface", "Export a decision-surface grid for a 2-feature model");
  std::string surf_model, surf_out = "surface.csv";
  std::size_t surf_grid = 200;
  surface_cmd->add_option("--model", surf_model, "Model file")->required();
  surface_cmd->add_option("--grid", surf_grid, "Grid resolution per axis")
      ->check(CLI::Range(2, 10000));
  surface_cmd->add_option("--out", surf_out, "Grid CSV path");

  // sweep-trees
  auto* sweep_cmd = app.add_subcommand(
      "sweep-trees", "Error versus ensemble size, with an optional reference");
  std::string sweep_data, sweep_schema, sweep_out;
  ForestFlags sweep_flags;
  std::vector<std::size_t> sweep_sizes{1, 5, 15, 50, 200};
  std::string sweep_ref_mode = "rf";
  std::size_t sweep_ref_trees = 500, sweep_folds = 10, sweep_repeats = 1;
  sweep_cmd->add_option("--data", sweep_data, "Dataset CSV")->required();
  sweep_cmd->add_option("--schema", sweep_schema, "Schema file")->required();
  sweep_cmd->add_option("--sizes", sweep_sizes, "Ensemble sizes")
      ->delimiter(',');
  sweep_cmd->add_option("--ref-mode", sweep_ref_mode, "Reference mode")
      ->check(CLI::IsMember({"ccf", "ccf-bag", "rf"}));
  sweep_cmd->add_option("--ref-trees", sweep_ref_trees,
                        "Reference ensemble size (0 = none)");
  sweep_cmd->add_option("--folds", sweep_folds, "Fold count");
  sweep_cmd->add_option("--repeats", sweep_repeats, "Repetitions");
  sweep_cmd->add_option("--out", sweep_out, "Report CSV path");
  sweep_flags.attach(sweep_cmd);

  try {
    app.parse(argc, argv);

    if (*train_cmd)
      return cmd_train(train_data, train_schema, train_out, train_flags);
    if (*predict_cmd) return cmd_predict(pred_model, pred_data, pred_out);
    if (*cv_cmd)
      return cmd_crossval(cv_data, cv_schema, cv_flags, cv_folds, cv_repeats,
                          cv_inverted, cv_no_stratify, cv_out, cv_dump);
    if (*gen_spirals) {
      write_dataset(ccf::gen_spirals(sp_n, sp_classes, sp_noise, sp_seed),
                    sp_out);
      return 0;
    }
    if (*gen_hv) {
      write_dataset(ccf::gen_hillvalley(hv_n, hv_noise, hv_seed), hv_out);
      return 0;
    }
    if (*gen_comp) {
      const Dataset ds = load_dataset(comp_data, comp_schema);
      write_dataset(
          ccf::make_compound(ds, {.kappa = comp_kappa, .beta = comp_beta},
                             comp_seed),
          comp_out);
      return 0;
    }
    if (*gen_aug) {
      const Dataset ds = load_dataset(aug_data, aug_schema);
      write_dataset(ccf::corr_augment(ccf::standardized_copy(ds),
                                      {.kappa = aug_kappa, .seed = aug_seed}),
                    aug_out);
      return 0;
    }
    if (*corr_cmd)
      return cmd_corr_experiment(corr_data, corr_schema, corr_flags,
                                 corr_kappas, corr_modes, corr_folds,
                                 corr_repeats, corr_out);
    if (*surface_cmd) return cmd_surface(surf_model, surf_out, surf_grid);
    if (*sweep_cmd)
      return cmd_sweep_trees(sweep_data, sweep_schema, sweep_flags,
                             sweep_sizes, sweep_ref_mode, sweep_ref_trees,
                             sweep_folds, sweep_repeats, sweep_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems exit with 2
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 1;
}
