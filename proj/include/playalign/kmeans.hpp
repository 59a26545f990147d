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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace playalign {

// Rows of a dense row-major matrix, optionally through an index list.
struct DataView {
  const double* data = nullptr;
  std::size_t dim = 0;
  std::size_t count = 0;
  const std::uint32_t* index = nullptr;

  static DataView dense(std::span<const double> values, std::size_t dim) {
    return {values.data(), dim, dim == 0 ? 0 : values.size() / dim, nullptr};
  }
  static DataView indexed(std::span<const double> values, std::size_t dim,
                          std::span<const std::uint32_t> rows) {
    return {values.data(), dim, rows.size(), rows.data()};
  }
  const double* row(std::size_t i) const {
    return data + (index != nullptr ? index[i] : i) * dim;
  }
  std::span<const double> row_span(std::size_t i) const {
    return {row(i), dim};
  }
};

struct KMeansConfig {
  int k = 2;
  int max_iterations = 100;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  int k = 0;
  std::vector<double> centroids;  // k x dim
  std::vector<int> labels;        // nearest centroid of each row
  int iterations = 0;
  bool converged = false;
  double inertia = 0.0;  // sum of squared distances to the assigned centroid

  std::span<const double> centroid(int c, std::size_t dim) const {
    return {centroids.data() + c * dim, dim};
  }
};

// Lloyd iterations from seeded farthest-point initialisation; stops when
// the labelling no longer changes. Empty clusters are re-seeded with the
// row farthest from its centroid. On return every label is the nearest
// centroid (ties to the lower index) and no cluster is empty; clusters that
// end up empty are dropped, so `k` may be smaller than requested.
// Returns nullopt when the data has fewer than `k` distinct rows.
std::optional<KMeansResult> kmeans(const DataView& data,
                                   const KMeansConfig& config);

// Lowest inertia over `restarts` seeds derived from config.seed.
std::optional<KMeansResult> kmeans_best_of(const DataView& data,
                                           const KMeansConfig& config,
                                           int restarts);

// Index of the nearest of `k` centroids under squared distance, lowest
// index on ties.
int nearest_centroid(std::span<const double> point,
                     std::span<const double> centroids, int k);

// Per-cluster means of `labels`; empty clusters get zeros.
std::vector<double> cluster_means(const DataView& data,
                                  std::span<const int> labels, int k);

}  // namespace playalign
