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

#pragma once

// Distance and accumulation kernels behind every inner loop (cost matrices,
// K-means, routing, ranking). Each variant follows the same fixed
// accumulation order, so scalar, AVX2 and NEON results are bit-identical and
// index files do not depend on the CPU that built them.
//
// Accumulation order for squared_distance: eight interleaved partial sums
// (element i goes to lane i % 8 for the largest multiple of 8), reduced as
// ((l0 + l4) + (l1 + l5)) + ((l2 + l6) + (l3 + l7)), then the tail elements
// are added one at a time. point_distance_sum uses four lanes over points in
// the order (p0, p2, p1, p3) of each group of four, reduced as
// (l0 + l1) + (l2 + l3), then the tail.

#include <cstddef>
#include <span>
#include <string_view>

namespace playalign::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // sum_p ||a_p - b_p||_2 over interleaved (x, y) points
  double (*point_distance_sum)(const double* a, const double* b,
                               std::size_t points);
  // acc[i] += x[i]
  void (*accumulate)(double* acc, const double* x, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the build target or the running CPU lacks the extension.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Chosen once per process: the widest supported table, unless the
// environment variable PLAYALIGN_SIMD=scalar forces the reference path.
const KernelTable& active();

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline double point_distance_sum(std::span<const double> a,
                                 std::span<const double> b) {
  return active().point_distance_sum(a.data(), b.data(), a.size() / 2);
}

inline void accumulate(std::span<double> acc, std::span<const double> x) {
  active().accumulate(acc.data(), x.data(), acc.size());
}

}  // namespace playalign::kernels
