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

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace playalign::kernels {

#if defined(__aarch64__)
namespace {

double squared_distance_neon(const double* a, const double* b,
                             std::size_t n) {
  // Four 2-lane accumulators hold lanes (0,1), (2,3), (4,5), (6,7).
  float64x2_t acc[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0),
                        vdupq_n_f64(0.0)};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int v = 0; v < 4; ++v) {
      const float64x2_t d =
          vsubq_f64(vld1q_f64(a + i + 2 * v), vld1q_f64(b + i + 2 * v));
      acc[v] = vaddq_f64(acc[v], vmulq_f64(d, d));
    }
  }
  const float64x2_t lo = vaddq_f64(acc[0], acc[2]);  // l0+l4, l1+l5
  const float64x2_t hi = vaddq_f64(acc[1], acc[3]);  // l2+l6, l3+l7
  double sum = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
               (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

inline double point_norm(const double* a, const double* b) {
  const float64x2_t d = vsubq_f64(vld1q_f64(a), vld1q_f64(b));
  const float64x2_t sq = vmulq_f64(d, d);
  return __builtin_sqrt(vgetq_lane_f64(sq, 0) + vgetq_lane_f64(sq, 1));
}

double point_distance_sum_neon(const double* a, const double* b,
                               std::size_t points) {
  double lane[4] = {0, 0, 0, 0};
  std::size_t p = 0;
  for (; p + 4 <= points; p += 4) {
    const double* pa = a + 2 * p;
    const double* pb = b + 2 * p;
    lane[0] += point_norm(pa, pb);
    lane[1] += point_norm(pa + 4, pb + 4);
    lane[2] += point_norm(pa + 2, pb + 2);
    lane[3] += point_norm(pa + 6, pb + 6);
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; p < points; ++p) sum += point_norm(a + 2 * p, b + 2 * p);
  return sum;
}

void accumulate_neon(double* acc, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(x + i)));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable table{"neon", squared_distance_neon,
                                 point_distance_sum_neon, accumulate_neon};
  return &table;
}

#else

const KernelTable* neon_table() { return nullptr; }

#endif

}  // namespace playalign::kernels
