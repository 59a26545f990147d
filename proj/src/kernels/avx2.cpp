// Copyright 2026 The playalign Authors
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

#include "playalign/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define PLAYALIGN_HAVE_X86 1
#endif

namespace playalign::kernels {

#ifdef PLAYALIGN_HAVE_X86
namespace {

// No "fma" in the target list: fused multiply-adds would round differently
// from the scalar reference.
__attribute__((target("avx2"))) double squared_distance_avx2(
    const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 =
        _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, _mm256_add_pd(acc0, acc1));
  double sum = (s[0] + s[1]) + (s[2] + s[3]);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

__attribute__((target("avx2"))) double point_distance_sum_avx2(
    const double* a, const double* b, std::size_t points) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 4 <= points; p += 4) {
    const double* pa = a + 2 * p;
    const double* pb = b + 2 * p;
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pa), _mm256_loadu_pd(pb));
    const __m256d d1 =
        _mm256_sub_pd(_mm256_loadu_pd(pa + 4), _mm256_loadu_pd(pb + 4));
    // lanes: points p, p+2, p+1, p+3
    const __m256d sq =
        _mm256_hadd_pd(_mm256_mul_pd(d0, d0), _mm256_mul_pd(d1, d1));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(sq));
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  double sum = (s[0] + s[1]) + (s[2] + s[3]);
  for (; p < points; ++p) {
    const double dx = a[2 * p] - b[2 * p];
    const double dy = a[2 * p + 1] - b[2 * p + 1];
    sum += __builtin_sqrt(dx * dx + dy * dy);
  }
  return sum;
}

__attribute__((target("avx2"))) void accumulate_avx2(double* acc,
                                                     const double* x,
                                                     std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i),
                                            _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2", squared_distance_avx2,
                                 point_distance_sum_avx2, accumulate_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace playalign::kernels
