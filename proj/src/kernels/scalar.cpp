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

#include <cmath>

#include "playalign/kernels.hpp"

namespace playalign::kernels {
namespace {

double squared_distance_scalar(const double* a, const double* b,
                               std::size_t n) {
  double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) {
      const double d = a[i + l] - b[i + l];
      lane[l] += d * d;
    }
  }
  double sum = ((lane[0] + lane[4]) + (lane[1] + lane[5])) +
               ((lane[2] + lane[6]) + (lane[3] + lane[7]));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

inline double point_distance(const double* a, const double* b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return std::sqrt(dx * dx + dy * dy);
}

double point_distance_sum_scalar(const double* a, const double* b,
                                 std::size_t points) {
  double lane[4] = {0, 0, 0, 0};
  std::size_t p = 0;
  for (; p + 4 <= points; p += 4) {
    const double* pa = a + 2 * p;
    const double* pb = b + 2 * p;
    lane[0] += point_distance(pa, pb);
    lane[1] += point_distance(pa + 4, pb + 4);
    lane[2] += point_distance(pa + 2, pb + 2);
    lane[3] += point_distance(pa + 6, pb + 6);
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; p < points; ++p) sum += point_distance(a + 2 * p, b + 2 * p);
  return sum;
}

void accumulate_scalar(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", squared_distance_scalar,
                                 point_distance_sum_scalar, accumulate_scalar};
  return table;
}

}  // namespace playalign::kernels
