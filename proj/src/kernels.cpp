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

#include "ccf/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ccf::kern {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc0 += a[i] * b[i];
    acc1 += a[i + 1] * b[i + 1];
  }
  if (i < n) acc0 += a[i] * b[i];
  return acc0 + acc1;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rot(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - s * xi;
  }
}

double sum(const double* a, std::size_t n) {
  double acc0 = 0.0, acc1 = 0.0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc0 += a[i];
    acc1 += a[i + 1];
  }
  if (i < n) acc0 += a[i];
  return acc0 + acc1;
}

}  // namespace scalar

namespace {

const Ops kScalarOps{scalar::dot, scalar::axpy, scalar::rot, scalar::sum,
                     "scalar"};

#if defined(CCF_HAVE_AVX2)
const Ops kAvx2Ops{avx2::dot, avx2::axpy, avx2::rot, avx2::sum, "avx2"};

bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

const Ops* resolve() {
  const char* forced = std::getenv("CCF_SIMD");
  if (forced != nullptr) {
    if (const Ops* ops = by_name(forced)) return ops;
  }
#if defined(CCF_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2Ops;
#endif
  return &kScalarOps;
}

}  // namespace

const Ops& active() {
  static const Ops* ops = resolve();
  return *ops;
}

const Ops* by_name(const char* name) {
  if (std::strcmp(name, "scalar") == 0) return &kScalarOps;
#if defined(CCF_HAVE_AVX2)
  if (std::strcmp(name, "avx2") == 0 && cpu_has_avx2()) return &kAvx2Ops;
#endif
  return nullptr;
}

}  // namespace ccf::kern
