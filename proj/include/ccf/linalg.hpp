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

#ifndef CCF_LINALG_HPP
#define CCF_LINALG_HPP

#include <cstddef>
#include <vector>

#include "ccf/matrix.hpp"

namespace ccf::la {

/// Thin pivoted QR of an n x d matrix (Businger-Golub column pivoting):
/// A(:, perm) = Q R with |R(0,0)| >= |R(1,1)| >= ... on the diagonal.
/// Q is n x m and R is m x d with m = min(n, d). Ties between column norms go
/// to the lowest original column index.
struct PivotedQr {
  ColMat q;                  // n x m, orthonormal columns
  ColMat r;                  // m x d, upper triangular
  std::vector<int> perm;     // size d; perm[j] = original index of working col j
};

PivotedQr qr_pivoted(const ColMat& a);

/// Thin SVD, A = U diag(s) V^T with singular values sorted descending.
/// U is m x r, V is n x r, r = min(m, n); both have orthonormal columns even
/// when some singular values are zero (the missing directions are completed).
/// One-sided Jacobi, accurate for the small well-scaled matrices we feed it.
struct Svd {
  ColMat u;
  std::vector<double> s;
  ColMat v;
};

Svd svd(const ColMat& a);

/// Solve R X = B for upper-triangular R (back substitution). B is overwritten
/// column by column; R must have a nonzero diagonal.
void solve_upper_triangular(const ColMat& r, ColMat& b);

/// Cholesky factor L (lower triangular) of a symmetric positive definite
/// matrix; returns false if a non-positive pivot is hit.
bool cholesky(const ColMat& a, ColMat& l);

/// Solve L y = b then L^T x = y in place.
void cholesky_solve_in_place(const ColMat& l, std::vector<double>& b);

/// Eigen-decomposition of a symmetric matrix via cyclic Jacobi rotations.
/// Eigenvalues are sorted descending; columns of `vectors` match.
struct SymEig {
  std::vector<double> values;
  ColMat vectors;
};

SymEig sym_eig(const ColMat& a);

/// C = A^T A for a column-major A (Gram matrix).
ColMat gram(const ColMat& a);

/// C = A^T B (columns of A against columns of B, shared row count).
ColMat cross(const ColMat& a, const ColMat& b);

/// Subtract the column means in place; returns the means.
std::vector<double> center_columns(ColMat& a);

}  // namespace ccf::la

#endif  // CCF_LINALG_HPP
