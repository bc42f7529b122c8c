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

#ifndef CCF_KERNELS_HPP
#define CCF_KERNELS_HPP

#include <cstddef>

// Vector kernels behind the dense linear algebra. Each kernel has a scalar
// reference implementation and, on x86-64 with AVX2+FMA, a vectorized variant.
// The active set is picked once at startup from CPUID; CCF_SIMD=scalar|avx2
// overrides the choice (used by the equivalence tests).
namespace ccf::kern {

struct Ops {
  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // plane rotation: (x[i], y[i]) <- (c*x[i] + s*y[i], -s*x[i] + c*y[i])
  void (*rot)(double* x, double* y, double c, double s, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  const char* name;
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace scalar

#if defined(CCF_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace avx2
#endif

/// Active kernel set (resolved on first use).
const Ops& active();

/// Kernel set by name ("scalar", "avx2"); nullptr if unavailable on this CPU.
const Ops* by_name(const char* name);

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void rot(double* x, double* y, double c, double s, std::size_t n) {
  active().rot(x, y, c, s, n);
}
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }

}  // namespace ccf::kern

#endif  // CCF_KERNELS_HPP
