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

#include "ccf/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ccf/kernels.hpp"

namespace ccf::la {

namespace {

constexpr double kTiny = 1e-300;

// Applies the Householder reflector (v, beta) to column `col` on rows
// [offset, n).
inline void apply_reflector(const double* v, double beta, double* col,
                            std::size_t offset, std::size_t n) {
  const double t = kern::dot(v + offset, col + offset, n - offset);
  kern::axpy(-beta * t, v + offset, col + offset, n - offset);
}

}  // namespace

PivotedQr qr_pivoted(const ColMat& a) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  const std::size_t m = std::min(n, d);

  ColMat w = a;  // working copy, reflected in place
  ColMat vs(n, m);
  std::vector<double> betas(m, 0.0);
  PivotedQr out;
  out.perm.resize(d);
  std::iota(out.perm.begin(), out.perm.end(), 0);

  std::size_t steps = 0;
  for (std::size_t k = 0; k < m; ++k) {
    // Exact trailing norms each step; cheap at our sizes and immune to the
    // cancellation that plagues downdating.
    std::size_t best = k;
    double best_norm = -1.0;
    for (std::size_t j = k; j < d; ++j) {
      const double nrm = kern::dot(w.col(j) + k, w.col(j) + k, n - k);
      if (nrm > best_norm ||
          (nrm == best_norm && out.perm[j] < out.perm[best])) {
        best_norm = nrm;
        best = j;
      }
    }
    if (best_norm <= kTiny) break;  // remaining block is numerically zero
    if (best != k) {
      std::swap_ranges(w.col(k), w.col(k) + n, w.col(best));
      std::swap(out.perm[k], out.perm[best]);
    }

    // Householder vector for column k, rows k..n-1.
    double* x = w.col(k);
    const double normx = std::sqrt(best_norm);
    const double alpha = x[k] >= 0.0 ? -normx : normx;
    double* v = vs.col(k);
    std::fill(v, v + n, 0.0);
    v[k] = x[k] - alpha;
    std::copy(x + k + 1, x + n, v + k + 1);
    const double vnorm2 = kern::dot(v + k, v + k, n - k);
    if (vnorm2 <= kTiny) {
      betas[k] = 0.0;
    } else {
      betas[k] = 2.0 / vnorm2;
    }
    x[k] = alpha;
    std::fill(x + k + 1, x + n, 0.0);

    for (std::size_t j = k + 1; j < d; ++j)
      apply_reflector(v, betas[k], w.col(j), k, n);
    steps = k + 1;
  }

  out.r = ColMat(m, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < std::min(j + 1, m); ++i) out.r(i, j) = w(i, j);

  // Q = H_0 ... H_{steps-1} applied to the first m identity columns.
  out.q = ColMat(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    double* col = out.q.col(j);
    col[j] = 1.0;
    for (std::size_t k = steps; k-- > 0;) {
      if (betas[k] != 0.0) apply_reflector(vs.col(k), betas[k], col, k, n);
    }
  }
  return out;
}

Svd svd(const ColMat& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) {
    ColMat t(n, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) t(j, i) = a(i, j);
    Svd flipped = svd(t);
    return Svd{std::move(flipped.v), std::move(flipped.s),
               std::move(flipped.u)};
  }

  Svd out;
  out.s.assign(n, 0.0);
  out.v = ColMat(n, n);
  for (std::size_t j = 0; j < n; ++j) out.v(j, j) = 1.0;
  if (n == 0) {
    out.u = ColMat(m, 0);
    return out;
  }

  ColMat w = a;
  const double tol = 1e-14;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    std::size_t rotations = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double app = kern::dot(w.col(p), w.col(p), m);
        const double aqq = kern::dot(w.col(q), w.col(q), m);
        const double apq = kern::dot(w.col(p), w.col(q), m);
        if (std::abs(apq) <= tol * std::sqrt(app * aqq) || app <= kTiny ||
            aqq <= kTiny)
          continue;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // col_p <- c*col_p - s*col_q ; col_q <- s*col_p + c*col_q
        kern::rot(w.col(q), w.col(p), c, s, m);
        kern::rot(out.v.col(q), out.v.col(p), c, s, n);
        ++rotations;
      }
    }
    if (rotations == 0) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j)
    norms[j] = std::sqrt(kern::dot(w.col(j), w.col(j), m));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

  out.u = ColMat(m, n);
  ColMat v_sorted(n, n);
  std::vector<std::size_t> zero_cols;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.s[j] = norms[src];
    std::copy(out.v.col(src), out.v.col(src) + n, v_sorted.col(j));
    if (norms[src] > 1e-290) {
      const double inv = 1.0 / norms[src];
      const double* wc = w.col(src);
      double* uc = out.u.col(j);
      for (std::size_t i = 0; i < m; ++i) uc[i] = wc[i] * inv;
    } else {
      out.s[j] = 0.0;
      zero_cols.push_back(j);
    }
  }
  out.v = std::move(v_sorted);

  // Complete U to orthonormal columns where singular values vanished.
  for (const std::size_t j : zero_cols) {
    for (std::size_t cand = 0; cand < m; ++cand) {
      std::vector<double> v(m, 0.0);
      v[cand] = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        const double proj = kern::dot(out.u.col(k), v.data(), m);
        kern::axpy(-proj, out.u.col(k), v.data(), m);
      }
      const double nrm = std::sqrt(kern::dot(v.data(), v.data(), m));
      if (nrm > 0.5) {
        const double inv = 1.0 / nrm;
        double* uc = out.u.col(j);
        for (std::size_t i = 0; i < m; ++i) uc[i] = v[i] * inv;
        break;
      }
    }
  }
  return out;
}

void solve_upper_triangular(const ColMat& r, ColMat& b) {
  const std::size_t n = r.rows();
  assert(r.cols() >= n && b.rows() == n);
  for (std::size_t c = 0; c < b.cols(); ++c) {
    double* x = b.col(c);
    for (std::size_t ii = n; ii-- > 0;) {
      double acc = x[ii];
      for (std::size_t j = ii + 1; j < n; ++j) acc -= r(ii, j) * x[j];
      x[ii] = acc / r(ii, ii);
    }
  }
}

bool cholesky(const ColMat& a, ColMat& l) {
  const std::size_t n = a.rows();
  l = ColMat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    // Rows of L are strided; plain loops, n is small here.
    double rowsq = 0.0;
    for (std::size_t k = 0; k < j; ++k) rowsq += l(j, k) * l(j, k);
    const double diag = a(j, j) - rowsq;
    if (diag <= 0.0) return false;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      l(i, j) = acc / l(j, j);
    }
  }
  return true;
}

void cholesky_solve_in_place(const ColMat& l, std::vector<double>& b) {
  const std::size_t n = l.rows();
  assert(b.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[i];
    for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * b[k];
    b[i] = acc / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) acc -= l(k, ii) * b[k];
    b[ii] = acc / l(ii, ii);
  }
}

SymEig sym_eig(const ColMat& a) {
  const std::size_t n = a.rows();
  assert(a.cols() == n);
  ColMat w = a;
  ColMat v(n, n);
  for (std::size_t j = 0; j < n; ++j) v(j, j) = 1.0;

  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += w(p, q) * w(p, q);
    if (off <= 1e-28 * (1.0 + std::abs(w(0, 0)))) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (std::abs(apq) <=
            1e-16 * std::sqrt(std::abs(w(p, p) * w(q, q)) + kTiny))
          continue;
        const double tau = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // W <- J^T W J with J rotating the (p, q) plane.
        for (std::size_t i = 0; i < n; ++i) {
          const double wip = w(i, p);
          const double wiq = w(i, q);
          w(i, p) = c * wip - s * wiq;
          w(i, q) = s * wip + c * wiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double wpi = w(p, i);
          const double wqi = w(q, i);
          w(p, i) = c * wpi - s * wqi;
          w(q, i) = s * wpi + c * wqi;
        }
        kern::rot(v.col(q), v.col(p), c, s, n);
      }
    }
  }

  SymEig out;
  out.values.resize(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return w(i, i) > w(j, j); });
  out.vectors = ColMat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = w(order[j], order[j]);
    std::copy(v.col(order[j]), v.col(order[j]) + n, out.vectors.col(j));
  }
  return out;
}

ColMat gram(const ColMat& a) {
  const std::size_t n = a.cols();
  ColMat c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = kern::dot(a.col(i), a.col(j), a.rows());
      c(i, j) = v;
      c(j, i) = v;
    }
  return c;
}

ColMat cross(const ColMat& a, const ColMat& b) {
  assert(a.rows() == b.rows());
  ColMat c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      c(i, j) = kern::dot(a.col(i), b.col(j), a.rows());
  return c;
}

std::vector<double> center_columns(ColMat& a) {
  const std::size_t n = a.rows();
  std::vector<double> mu(a.cols(), 0.0);
  if (n == 0) return mu;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double* col = a.col(j);
    const double m = kern::sum(col, n) / static_cast<double>(n);
    mu[j] = m;
    for (std::size_t i = 0; i < n; ++i) col[i] -= m;
  }
  return mu;
}

}  // namespace ccf::la
