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

#include "playalign/kmeans.hpp"

#include <limits>
#include <random>

#include "playalign/errors.hpp"
#include "playalign/kernels.hpp"
#include "playalign/util.hpp"

namespace playalign {

int nearest_centroid(std::span<const double> point,
                     std::span<const double> centroids, int k) {
  const std::size_t dim = point.size();
  const kernels::KernelTable& kt = kernels::active();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < k; ++c) {
    const double d =
        kt.squared_distance(point.data(), centroids.data() + c * dim, dim);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<double> cluster_means(const DataView& data,
                                  std::span<const int> labels, int k) {
  std::vector<double> sums(static_cast<std::size_t>(k) * data.dim, 0.0);
  std::vector<std::size_t> counts(k, 0);
  const kernels::KernelTable& kt = kernels::active();
  for (std::size_t i = 0; i < data.count; ++i) {
    kt.accumulate(sums.data() + labels[i] * data.dim, data.row(i), data.dim);
    ++counts[labels[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    const double n = static_cast<double>(counts[c]);
    for (std::size_t j = 0; j < data.dim; ++j) sums[c * data.dim + j] /= n;
  }
  return sums;
}

namespace {

// Returns false when fewer than k distinct rows exist.
bool farthest_point_init(const DataView& data, int k, std::uint64_t seed,
                         std::vector<double>& centroids) {
  const kernels::KernelTable& kt = kernels::active();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, data.count - 1);
  std::size_t first = pick(rng);
  centroids.assign(data.row(first), data.row(first) + data.dim);
  std::vector<double> nearest(data.count);
  for (std::size_t i = 0; i < data.count; ++i) {
    nearest[i] = kt.squared_distance(data.row(i), data.row(first), data.dim);
  }
  for (int c = 1; c < k; ++c) {
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < data.count; ++i) {
      if (nearest[i] > far_d) {
        far_d = nearest[i];
        far = i;
      }
    }
    if (!(far_d > 0.0)) return false;
    centroids.insert(centroids.end(), data.row(far), data.row(far) + data.dim);
    const double* cen = centroids.data() + c * data.dim;
    for (std::size_t i = 0; i < data.count; ++i) {
      nearest[i] = std::min(nearest[i],
                            kt.squared_distance(data.row(i), cen, data.dim));
    }
  }
  return true;
}

void assign_labels(const DataView& data, std::span<const double> centroids,
                   int k, std::vector<int>& labels,
                   std::vector<double>& dist) {
  parallel_for(data.count, [&](std::size_t begin, std::size_t end) {
    const kernels::KernelTable& kt = kernels::active();
    for (std::size_t i = begin; i < end; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = kt.squared_distance(
            data.row(i), centroids.data() + c * data.dim, data.dim);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[i] = best;
      dist[i] = best_d;
    }
  }, 16);
}

}  // namespace

std::optional<KMeansResult> kmeans(const DataView& data,
                                   const KMeansConfig& config) {
  if (config.k < 1) throw InvalidArgument("kmeans: k must be >= 1");
  if (data.count == 0) throw InvalidArgument("kmeans: no data");
  if (static_cast<std::size_t>(config.k) > data.count) return std::nullopt;

  const int k = config.k;
  const std::size_t dim = data.dim;
  KMeansResult r;
  r.k = k;
  if (!farthest_point_init(data, k, config.seed, r.centroids)) {
    return std::nullopt;
  }
  r.labels.assign(data.count, -1);
  std::vector<int> labels(data.count, 0);
  std::vector<double> dist(data.count, 0.0);

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    assign_labels(data, r.centroids, k, labels, dist);
    r.iterations = iter;
    if (labels == r.labels) {
      r.converged = true;
      break;
    }
    r.labels = labels;
    std::vector<std::size_t> counts(k, 0);
    for (int l : labels) ++counts[l];
    // Re-seed empty clusters with the rows farthest from their centroids.
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < data.count; ++i) {
        if (counts[r.labels[i]] > 1 && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      --counts[r.labels[far]];
      r.labels[far] = c;
      dist[far] = 0.0;
      counts[c] = 1;
    }
    r.centroids = cluster_means(data, r.labels, k);
  }

  // Final labelling against the returned centroids.
  assign_labels(data, r.centroids, k, labels, dist);
  std::vector<std::size_t> counts(k, 0);
  for (int l : labels) ++counts[l];
  std::vector<int> remap(k, -1);
  int kept = 0;
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) remap[c] = kept++;
  }
  if (kept != k) {
    std::vector<double> cen;
    cen.reserve(kept * dim);
    for (int c = 0; c < k; ++c) {
      if (remap[c] >= 0) {
        cen.insert(cen.end(), r.centroids.begin() + c * dim,
                   r.centroids.begin() + (c + 1) * dim);
      }
    }
    r.centroids = std::move(cen);
    for (int& l : labels) l = remap[l];
    r.k = kept;
  }
  r.labels = std::move(labels);
  r.inertia = 0.0;
  for (double d : dist) r.inertia += d;
  return r;
}

std::optional<KMeansResult> kmeans_best_of(const DataView& data,
                                           const KMeansConfig& config,
                                           int restarts) {
  std::optional<KMeansResult> best;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    KMeansConfig c = config;
    c.seed = r == 0 ? config.seed : derive_seed(config.seed, r);
    auto result = kmeans(data, c);
    if (result && (!best || result->inertia < best->inertia)) {
      best = std::move(result);
    }
  }
  return best;
}

}  // namespace playalign
