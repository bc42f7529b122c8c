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

#include "ccf/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ccf/rng.hpp"

namespace ccf {

namespace {

Schema all_ordinal_schema(const std::vector<std::string>& feature_names,
                          const std::string& label_name,
                          const std::vector<std::string>& class_names) {
  Schema s;
  for (const std::string& n : feature_names) {
    SchemaColumn c;
    c.name = n;
    c.role = ColumnRole::kOrdinal;
    s.columns.push_back(std::move(c));
  }
  SchemaColumn lab;
  lab.name = label_name;
  lab.role = ColumnRole::kLabel;
  s.label_col = s.columns.size();
  s.columns.push_back(std::move(lab));
  s.class_names = class_names;
  return s;
}

std::vector<FeatureGroup> plain_groups(
    const std::vector<std::string>& feature_names) {
  std::vector<FeatureGroup> groups;
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    FeatureGroup g;
    g.name = feature_names[i];
    g.one_hot = false;
    g.col_begin = static_cast<std::uint32_t>(i);
    g.col_end = static_cast<std::uint32_t>(i + 1);
    groups.push_back(std::move(g));
  }
  return groups;
}

/// Encoded-column names for a dataset that is about to lose its grouping
/// (after correlation injection everything is a plain numeric column).
std::vector<std::string> encoded_column_names(const Dataset& ds) {
  std::vector<std::string> names;
  for (const FeatureGroup& g : ds.groups) {
    if (!g.one_hot) {
      names.push_back(g.name);
      continue;
    }
    for (std::uint32_t c = g.col_begin; c < g.col_end; ++c)
      names.push_back(g.name + "__" +
                      std::to_string(static_cast<unsigned>(c - g.col_begin)));
  }
  return names;
}

}  // namespace

Dataset gen_spirals(std::size_t n_points, std::size_t n_classes,
                    double noise_std, std::uint64_t seed) {
  if (n_classes < 2) throw std::runtime_error("gen_spirals: need >= 2 classes");
  if (n_points < n_classes)
    throw std::runtime_error("gen_spirals: need at least one point per class");

  std::vector<std::string> class_names;
  for (std::size_t k = 0; k < n_classes; ++k)
    class_names.push_back("spiral" + std::to_string(k));
  const std::vector<std::string> features{"x", "y"};

  Dataset ds;
  ds.schema = all_ordinal_schema(features, "class", class_names);
  ds.groups = plain_groups(features);
  ds.x = Matrix(n_points, 2);
  ds.missing.assign(n_points * 2, 0);
  ds.labels.resize(n_points);

  constexpr double kArcStart = std::numbers::pi / 2.0;
  constexpr double kArcLength = 3.0 * std::numbers::pi;

  Rng rng(splitmix64(seed ^ 0x5b17a15ULL));
  for (std::size_t i = 0; i < n_points; ++i) {
    const std::size_t k = i % n_classes;
    const double theta = kArcStart + kArcLength * rng.unit();
    const double rot = 2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(n_classes);
    ds.x(i, 0) = theta * std::cos(theta + rot) + noise_std * rng.normal();
    ds.x(i, 1) = theta * std::sin(theta + rot) + noise_std * rng.normal();
    ds.labels[i] = static_cast<int>(k);
  }
  return ds;
}

Dataset corr_augment(const Dataset& ds, const CorrParams& p) {
  if (p.kappa < 0.0) throw std::runtime_error("corr_augment: kappa must be >= 0");
  const std::size_t n = ds.n_rows();
  const std::size_t d = ds.n_cols();

  std::vector<std::string> names = encoded_column_names(ds);
  names.push_back("injected");

  Dataset out;
  out.schema = all_ordinal_schema(names, ds.schema.columns[ds.schema.label_col].name,
                                  ds.schema.class_names);
  out.groups = plain_groups(names);
  out.x = Matrix(n, d + 1);
  out.missing.assign(n * (d + 1), 0);
  out.labels = ds.labels;

  Rng rng(splitmix64(p.seed ^ 0xc0e4a7ULL));
  // Draw order: the injected column first, then one sign per existing column.
  for (std::size_t r = 0; r < n; ++r) out.x(r, d) = p.kappa * rng.normal();
  for (std::size_t c = 0; c < d; ++c) {
    const double sign = static_cast<double>(rng.sign());
    for (std::size_t r = 0; r < n; ++r)
      out.x(r, c) = ds.x(r, c) + sign * out.x(r, d);
  }
  return out;
}

Dataset make_compound(const Dataset& ds, const CompoundParams& p,
                      std::uint64_t seed) {
  if (!std::isfinite(p.beta)) throw std::runtime_error("make_compound: beta");
  const Dataset base = standardized_copy(ds);
  CorrParams cp;
  cp.kappa = p.kappa;
  cp.seed = splitmix64(seed ^ 0x11aa22bb33ULL);
  const Dataset block_a = corr_augment(base, cp);
  cp.seed = splitmix64(seed ^ 0x44cc55dd66ULL);
  const Dataset block_b = corr_augment(base, cp);

  const std::size_t n = base.n_rows();
  const std::size_t d1 = block_a.n_cols();
  const std::size_t k = base.n_classes();

  std::vector<std::string> class_names = base.schema.class_names;
  for (std::size_t c = 0; c < k; ++c)
    class_names.push_back(base.schema.class_names[c] + "_replica");

  std::vector<std::string> names;
  for (const FeatureGroup& g : block_a.groups) names.push_back(g.name);

  Dataset out;
  out.schema = all_ordinal_schema(
      names, ds.schema.columns[ds.schema.label_col].name, class_names);
  out.groups = plain_groups(names);
  out.x = Matrix(2 * n, d1);
  out.missing.assign(2 * n * d1, 0);
  out.labels.resize(2 * n);

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d1; ++c) {
      out.x(r, c) = block_a.x(r, c);
      out.x(n + r, c) = block_b.x(r, c) + p.beta;
    }
    out.labels[r] = base.labels[r];
    out.labels[n + r] = base.labels[r] + static_cast<int>(k);
  }
  return out;
}

Dataset gen_hillvalley(std::size_t n_points, double noise_frac,
                       std::uint64_t seed) {
  constexpr std::size_t kCurveLen = 100;
  std::vector<std::string> features;
  for (std::size_t t = 0; t < kCurveLen; ++t)
    features.push_back("t" + std::to_string(t + 1));

  Dataset ds;
  ds.schema = all_ordinal_schema(features, "class", {"hill", "valley"});
  ds.groups = plain_groups(features);
  ds.x = Matrix(n_points, kCurveLen);
  ds.missing.assign(n_points * kCurveLen, 0);
  ds.labels.resize(n_points);

  Rng rng(splitmix64(seed ^ 0x411e7ULL));
  constexpr std::size_t kTerrainWaves = 3;
  constexpr double kTerrainAmp = 0.05;
  constexpr double kBaseLog = 16.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const bool hill = i % 2 == 0;
    // Baseline level varies over four orders of magnitude and everything,
    // bump included, scales with it: thresholds on single coordinates say
    // nothing, while the sign of local coordinate differences still carries
    // the class.
    const double base = std::exp(rng.uniform(0.0, kBaseLog));
    const double slope = base * rng.uniform(-0.3, 0.3) / kCurveLen;
    double wave_amp[kTerrainWaves], wave_freq[kTerrainWaves],
        wave_phase[kTerrainWaves];
    for (std::size_t h = 0; h < kTerrainWaves; ++h) {
      // Wavelengths well above the bump width: the bump stays the only
      // sharp feature, the terrain only scrambles absolute levels.
      wave_amp[h] = base * rng.uniform(0.0, kTerrainAmp);
      wave_freq[h] = rng.uniform(0.25, 0.8);
      wave_phase[h] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    const double center = rng.uniform(5.0, 95.0);
    const double width = rng.uniform(5.0, 15.0);
    const double amp = base * rng.uniform(0.25, 0.9);
    for (std::size_t t = 0; t < kCurveLen; ++t) {
      const double pos = static_cast<double>(t);
      const double dt = (pos - center) / width;
      double v = base + slope * pos +
                 (hill ? amp : -amp) * std::exp(-0.5 * dt * dt);
      for (std::size_t h = 0; h < kTerrainWaves; ++h)
        v += wave_amp[h] *
             std::sin(2.0 * std::numbers::pi * wave_freq[h] * pos / kCurveLen +
                      wave_phase[h]);
      if (noise_frac > 0.0) v += noise_frac * base * rng.normal();
      ds.x(i, t) = v;
    }
    ds.labels[i] = hill ? 0 : 1;
  }
  return ds;
}

}  // namespace ccf
