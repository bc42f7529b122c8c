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

#ifndef CCF_CCA_HPP
#define CCF_CCA_HPP

#include <cstddef>
#include <vector>

#include "ccf/matrix.hpp"

namespace ccf {

struct CcaConfig {
  /// Relative tolerance on the pivoted-QR diagonal used for rank reduction.
  /// Must lie in [0, 1). Larger values drop near-degenerate directions and
  /// act as regularization of the learned projections.
  double epsilon = 1e-4;
};

/// Paired projections from canonical correlation analysis of two matrices
/// sharing a row count. Columns of `a` and `b` are ordered by decreasing
/// canonical correlation. Rows of `a` (resp. `b`) that correspond to input
/// columns dropped by the rank reduction are exactly zero.
struct CcaResult {
  ColMat a;                 // d x n_pairs, coefficients for the first input
  ColMat b;                 // k x n_pairs, coefficients for the second input
  std::vector<double> rho;  // canonical correlations, non-increasing in [0, 1]
  std::size_t rank_w = 0;   // retained rank of the first input
  std::size_t rank_v = 0;   // retained rank of the second input

  std::size_t n_pairs() const { return rho.size(); }
};

/// Numerically stable CCA: center both inputs, pivoted QR on each, reduce to
/// the ranks where |R(i,i)| > epsilon * |R(0,0)|, then an SVD of the reduced
/// Q-product and triangular back substitution for the coefficients.
///
/// Degenerate inputs do not fail: an all-constant side simply yields a result
/// with zero pairs. Throws std::invalid_argument for fewer than two rows,
/// mismatched row counts, non-finite entries, or epsilon outside [0, 1).
CcaResult cca_stable(const ColMat& w, const ColMat& v, const CcaConfig& cfg = {});

/// Row-major convenience overload.
CcaResult cca_stable(const Matrix& w, const Matrix& v, const CcaConfig& cfg = {});

/// Closed-form reference solver: forms the covariance matrices explicitly and
/// takes square roots of the eigenvalues of Sww^-1 Swv Svv^-1 Svw. Validation
/// only; it needs well-conditioned covariances and is never called during
/// training. Throws std::domain_error when either covariance has an estimated
/// condition number above 1e12.
std::vector<double> cca_oracle(const ColMat& w, const ColMat& v);
std::vector<double> cca_oracle(const Matrix& w, const Matrix& v);

}  // namespace ccf

#endif  // CCF_CCA_HPP
