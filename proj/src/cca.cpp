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

#include "ccf/cca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ccf/kernels.hpp"
#include "ccf/linalg.hpp"

namespace ccf {

namespace {

void check_inputs(const ColMat& w, const ColMat& v, const CcaConfig& cfg) {
  if (w.rows() != v.rows())
    throw std::invalid_argument("cca: inputs must share their row count");
  if (w.rows() < 2)
    throw std::invalid_argument("cca: need at least two rows to center");
  if (w.cols() < 1 || v.cols() < 1)
    throw std::invalid_argument("cca: inputs must have at least one column");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0))
    throw std::invalid_argument("cca: epsilon must lie in [0, 1)");
  for (std::size_t c = 0; c < w.cols(); ++c)
    for (std::size_t r = 0; r < w.rows(); ++r)
      if (!std::isfinite(w(r, c)))
        throw std::invalid_argument("cca: non-finite entry in first input");
  for (std::size_t c = 0; c < v.cols(); ++c)
    for (std::size_t r = 0; r < v.rows(); ++r)
      if (!std::isfinite(v(r, c)))
        throw std::invalid_argument("cca: non-finite entry in second input");
}

/// Retained rank: number of leading pivoted-QR diagonal entries with
/// |R(i,i)| > epsilon * |R(0,0)|. The pivoting makes the diagonal
/// non-increasing in magnitude, so this is a prefix count.
std::size_t reduced_rank(const la::PivotedQr& f, double epsilon) {
  const std::size_t m = std::min(f.r.rows(), f.r.cols());
  if (m == 0) return 0;
  const double head = std::abs(f.r(0, 0));
  if (head == 0.0) return 0;
  std::size_t zeta = 0;
  while (zeta < m && std::abs(f.r(zeta, zeta)) > epsilon * head) ++zeta;
  return zeta;
}

/// Scatter the reduced coefficients back to original column order, zero rows
/// for the columns the rank reduction pivoted away.
ColMat scatter_rows(const ColMat& reduced, const std::vector<int>& perm,
                    std::size_t full_dim) {
  ColMat out(full_dim, reduced.cols());
  for (std::size_t i = 0; i < reduced.rows(); ++i) {
    const std::size_t dst = static_cast<std::size_t>(perm[i]);
    for (std::size_t c = 0; c < reduced.cols(); ++c) out(dst, c) = reduced(i, c);
  }
  return out;
}

ColMat take_cols(const ColMat& a, std::size_t count) {
  ColMat out(a.rows(), count);
  for (std::size_t c = 0; c < count; ++c)
    std::copy(a.col(c), a.col(c) + a.rows(), out.col(c));
  return out;
}

ColMat shrink(const ColMat& q, const ColMat& r, std::size_t zeta,
              ColMat& r_out) {
  r_out = ColMat(zeta, zeta);
  for (std::size_t j = 0; j < zeta; ++j)
    for (std::size_t i = 0; i <= j; ++i) r_out(i, j) = r(i, j);
  return take_cols(q, zeta);
}

}  // namespace

CcaResult cca_stable(const ColMat& w_in, const ColMat& v_in,
                     const CcaConfig& cfg) {
  check_inputs(w_in, v_in, cfg);

  ColMat w = w_in;
  ColMat v = v_in;
  la::center_columns(w);
  la::center_columns(v);

  const la::PivotedQr fw = la::qr_pivoted(w);
  const la::PivotedQr fv = la::qr_pivoted(v);
  const std::size_t zw = reduced_rank(fw, cfg.epsilon);
  const std::size_t zv = reduced_rank(fv, cfg.epsilon);

  CcaResult res;
  res.rank_w = zw;
  res.rank_v = zv;
  if (zw == 0 || zv == 0) {
    res.a = ColMat(w.cols(), 0);
    res.b = ColMat(v.cols(), 0);
    return res;
  }

  ColMat rw, rv;
  const ColMat qw = shrink(fw.q, fw.r, zw, rw);
  const ColMat qv = shrink(fv.q, fv.r, zv, rv);
  const std::size_t n_pairs = std::min(zw, zv);

  // SVD of the smaller-oriented Q product; both orders are equivalent.
  ColMat u, z;
  std::vector<double> omega;
  if (zw > zv) {
    la::Svd dec = la::svd(la::cross(qw, qv));
    u = std::move(dec.u);
    z = std::move(dec.v);
    omega = std::move(dec.s);
  } else {
    la::Svd dec = la::svd(la::cross(qv, qw));
    z = std::move(dec.u);
    u = std::move(dec.v);
    omega = std::move(dec.s);
  }
  ColMat ured = take_cols(u, n_pairs);
  ColMat zred = take_cols(z, n_pairs);
  omega.resize(n_pairs);

  // Deterministic orientation: largest-magnitude entry of each u column is
  // positive. Downstream split search is sign-invariant, this only pins
  // golden outputs.
  for (std::size_t c = 0; c < n_pairs; ++c) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < ured.rows(); ++i) {
      const double mag = std::abs(ured(i, c));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (ured(arg, c) < 0.0) {
      for (std::size_t i = 0; i < ured.rows(); ++i) ured(i, c) = -ured(i, c);
      for (std::size_t i = 0; i < zred.rows(); ++i) zred(i, c) = -zred(i, c);
    }
  }

  // Coefficients by back substitution against the reduced triangles.
  la::solve_upper_triangular(rw, ured);
  la::solve_upper_triangular(rv, zred);

  res.a = scatter_rows(ured, fw.perm, w.cols());
  res.b = scatter_rows(zred, fv.perm, v.cols());
  res.rho.resize(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i)
    res.rho[i] = std::clamp(omega[i], 0.0, 1.0);
  return res;
}

CcaResult cca_stable(const Matrix& w, const Matrix& v, const CcaConfig& cfg) {
  return cca_stable(to_col_major(w), to_col_major(v), cfg);
}

std::vector<double> cca_oracle(const ColMat& w_in, const ColMat& v_in) {
  if (w_in.rows() != v_in.rows() || w_in.rows() < 2)
    throw std::invalid_argument("cca_oracle: bad shapes");

  ColMat w = w_in;
  ColMat v = v_in;
  la::center_columns(w);
  la::center_columns(v);
  const double scale = 1.0 / static_cast<double>(w.rows() - 1);

  auto covariance = [scale](const ColMat& x) {
    ColMat c = la::gram(x);
    for (std::size_t j = 0; j < c.cols(); ++j)
      for (std::size_t i = 0; i < c.rows(); ++i) c(i, j) *= scale;
    return c;
  };
  const ColMat sww = covariance(w);
  const ColMat svv = covariance(v);
  ColMat swv = la::cross(w, v);
  for (std::size_t j = 0; j < swv.cols(); ++j)
    for (std::size_t i = 0; i < swv.rows(); ++i) swv(i, j) *= scale;

  auto reject_ill_conditioned = [](const ColMat& c, const char* which) {
    const la::SymEig eig = la::sym_eig(c);
    const double lmax = eig.values.front();
    const double lmin = eig.values.back();
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
      throw std::domain_error(std::string("cca_oracle: covariance of ") +
                              which + " is ill-conditioned");
  };
  reject_ill_conditioned(sww, "first input");
  reject_ill_conditioned(svv, "second input");

  ColMat lw, lv;
  if (!la::cholesky(sww, lw) || !la::cholesky(svv, lv))
    throw std::domain_error("cca_oracle: covariance not positive definite");

  // T = Lw^-1 Swv Lv^-T; the target eigenvalues equal those of T T^T.
  ColMat t = swv;
  for (std::size_t c = 0; c < t.cols(); ++c) {
    // forward substitution with Lw on each column
    double* x = t.col(c);
    for (std::size_t i = 0; i < t.rows(); ++i) {
      double acc = x[i];
      for (std::size_t k = 0; k < i; ++k) acc -= lw(i, k) * x[k];
      x[i] = acc / lw(i, i);
    }
  }
  // Right-solve against Lv^T: rows of T, i.e. forward substitution with Lv on
  // each row of T.
  for (std::size_t rrow = 0; rrow < t.rows(); ++rrow) {
    for (std::size_t i = 0; i < t.cols(); ++i) {
      double acc = t(rrow, i);
      for (std::size_t k = 0; k < i; ++k) acc -= lv(i, k) * t(rrow, k);
      t(rrow, i) = acc / lv(i, i);
    }
  }

  ColMat ttt(t.rows(), t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < t.cols(); ++k) acc += t(i, k) * t(j, k);
      ttt(i, j) = acc;
    }

  const la::SymEig eig = la::sym_eig(ttt);
  const std::size_t count = std::min(w.cols(), v.cols());
  std::vector<double> rho(count);
  for (std::size_t i = 0; i < count; ++i)
    rho[i] = std::sqrt(std::clamp(eig.values[i], 0.0, 1.0));
  return rho;
}

std::vector<double> cca_oracle(const Matrix& w, const Matrix& v) {
  return cca_oracle(to_col_major(w), to_col_major(v));
}

}  // namespace ccf
