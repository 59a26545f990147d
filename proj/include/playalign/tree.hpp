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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "playalign/assignment.hpp"
#include "playalign/kmeans.hpp"
#include "playalign/model.hpp"
#include "playalign/template.hpp"

namespace playalign {

struct TreeConfig {
  explicit TreeConfig(std::uint64_t seed) : rng_seed(seed), templates(seed) {}

  std::size_t max_leaf_size = 2000;
  int max_depth = 6;  // number of layers, the root being layer 0
  int k_min = 2;
  int k_max = 10;
  std::uint64_t rng_seed;
  // Per-node template learning; its rng_seed is replaced by a seed derived
  // from (rng_seed, node id, team).
  TemplateLearnConfig templates;
  int kmeans_max_iterations = 100;
  // Node reconstruction cost under the euclidean metric is summed over all
  // pairs up to this many plays, and estimated from sampled pairs above it.
  std::size_t exact_pair_limit = 2048;
  std::size_t sampled_pairs = 200000;
};

void validate(const TreeConfig& config);

struct ChildLink {
  int node = -1;
  std::vector<double> centroid;  // in the parent's aligned flattened space
};

struct TreeNode {
  int id = 0;
  int layer = 0;
  int parent = -1;
  Template offense;
  Template defense;
  std::vector<ChildLink> children;
  std::vector<std::string> play_ids;  // leaves only
  std::size_t play_count = 0;
  bool parent_aligned = false;
  double partition_score = 0.0;  // score of the chosen split, internal nodes
  double reconstruction_cost = 0.0;

  bool is_leaf() const { return children.empty(); }
};

struct AlignmentTree {
  TreeConfig config{0};
  int window_seconds = 0;
  int frames = 0;
  int agents_per_team = 0;
  double sample_rate = 25.0;
  std::vector<TreeNode> nodes;  // nodes[id]; nodes[0] is the root
  // Reconstruction cost of the partition formed by the nodes of each layer
  // together with the leaves above it.
  std::vector<double> layer_costs;

  const TreeNode& root() const { return nodes.front(); }
  std::size_t leaf_count() const;
  std::vector<int> leaf_ids() const;
  int depth() const;
};

// Silhouette-like separation score of a labelled partition, averaged over
// rows: (d_neighbor - d_own) / d_neighbor with distances to cluster means.
// A row at zero distance from both means contributes 0.
double partition_score(const DataView& data, std::span<const int> labels,
                       int k, CostMetric metric = CostMetric::euclidean);
double partition_score(const DataView& data, std::span<const int> labels,
                       std::span<const double> means, int k,
                       CostMetric metric = CostMetric::euclidean);

struct Partition {
  int k = 0;
  std::vector<double> centroids;
  std::vector<int> labels;
  double score = 0.0;
  // (K, score) for every K that produced a valid clustering.
  std::vector<std::pair<int, double>> scores;
};

// K-means for each K in [k_min, k_max] (capped at the row count) and the
// clustering with the highest score, smallest K on ties. nullopt means the
// node should not be split.
std::optional<Partition> choose_partition(const DataView& data, int k_min,
                                          int k_max, std::uint64_t seed,
                                          CostMetric metric,
                                          int kmeans_max_iterations = 100);

struct PlayPlacement {
  int leaf = -1;
  PermutationMap offense;
  PermutationMap defense;
};

struct TreeBuildResult {
  AlignmentTree tree;
  std::vector<PlayPlacement> placements;  // parallel to the input plays
};

TreeBuildResult build_tree(std::span<const Play> plays,
                           const TreeConfig& config);

inline AlignmentTree grow_tree(std::span<const Play> plays,
                               const TreeConfig& config) {
  return build_tree(plays, config).tree;
}

struct TreeAlignment {
  Play aligned;
  int leaf = -1;
  PermutationMap offense;  // composed over the path, maps slot -> input agent
  PermutationMap defense;
  std::vector<int> path;   // node ids from the root to the leaf
  double leaf_cost = 0.0;  // assignment cost against the leaf templates
};

TreeAlignment align_with_tree(const Play& play, const AlignmentTree& tree);

// Aligns one team of `play` in place against `templ`; returns the map used.
PermutationMap align_team(Play& play, const Template& templ, TeamScope team,
                          CostMetric metric, double* cost = nullptr);

}  // namespace playalign
