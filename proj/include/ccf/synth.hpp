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

#ifndef CCF_SYNTH_HPP
#define CCF_SYNTH_HPP

#include <cstdint>

#include "ccf/dataset.hpp"

namespace ccf {

/// Points on K interleaved Archimedean spirals (r = theta, theta uniform over
/// [pi/2, pi/2 + 3pi], class k rotated by 2 pi k / K) with isotropic Gaussian
/// noise. Classes are balanced by round-robin assignment. Deterministic per
/// seed.
Dataset gen_spirals(std::size_t n_points, std::size_t n_classes,
                    double noise_std, std::uint64_t seed);
inline constexpr double kSpiralsDefaultNoise = 0.25;

struct CorrParams {
  double kappa = 100.0;  // std of the injected feature
  std::uint64_t seed = 0;
};

/// Correlation injection: append one N(0, kappa^2) column, then add or
/// subtract it (sign drawn once per column) from every existing encoded
/// column. The input is expected to be preprocessed (z-scored, no missing
/// cells); all columns become plain ordinal features.
Dataset corr_augment(const Dataset& ds, const CorrParams& p);

struct CompoundParams {
  double kappa = 100.0;
  double beta = 2000.0;  // offset separating the replica block
};

/// Compound dataset: stack an independently correlation-injected replica,
/// shifted by beta in every column, under the original; replica rows keep
/// their class identity but as new classes (k -> k + K). Output: 2N rows,
/// 2K classes, D+1 columns.
Dataset make_compound(const Dataset& ds, const CompoundParams& p,
                      std::uint64_t seed);

/// Smooth terrain curves of 100 points holding one bump (class "hill") or dip
/// (class "valley") at a random position, on a random baseline with a random
/// linear trend; amplitudes scale with the baseline so no single coordinate
/// is informative. `noise_frac` adds proportional Gaussian noise (0 = smooth
/// variant).
Dataset gen_hillvalley(std::size_t n_points, double noise_frac,
                       std::uint64_t seed);

}  // namespace ccf

#endif  // CCF_SYNTH_HPP
