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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "playalign/model.hpp"
#include "playalign/play_store.hpp"
#include "playalign/tree.hpp"

namespace playalign {

// Bucket entry: a stored play and the maps (slot -> raw agent) that align it
// to its node's templates.
struct HashEntry {
  std::string play_id;
  PermutationMap offense;
  PermutationMap defense;
  const Play* play = nullptr;  // resolved when a store is attached
};

// Ball-trajectory clustering with a single role alignment; the comparison
// point for tree retrieval.
struct BaselineIndex {
  int clusters = 0;
  std::size_t dim = 0;  // ball-only flattened length
  std::vector<double> centroids;
  Template offense;  // role templates
  Template defense;
  std::vector<std::vector<HashEntry>> buckets;  // per cluster
};

struct WindowIndex {
  int window_seconds = 0;
  AlignmentTree tree;
  std::map<int, std::vector<HashEntry>> buckets;  // leaf node id -> entries
  std::optional<BaselineIndex> baseline;
};

struct IndexConfig {
  explicit IndexConfig(std::uint64_t seed) : tree(seed) {}

  TreeConfig tree;
  bool with_baseline = true;
  std::set<int> windows;  // empty = every window length in the store
};

class PlayIndex {
 public:
  PlayIndex() = default;

  const std::map<int, WindowIndex>& windows() const { return windows_; }
  const WindowIndex* window(int window_seconds) const;
  void add_window(WindowIndex window);

  // Resolves every entry against `store`; throws NotFound for missing plays.
  void attach(std::shared_ptr<const PlayStore> store);
  const PlayStore* store() const { return store_.get(); }
  std::size_t play_count() const;

 private:
  std::map<int, WindowIndex> windows_;
  std::shared_ptr<const PlayStore> store_;
};

PlayIndex build_index(std::shared_ptr<const PlayStore> store,
                      const IndexConfig& config);

BaselineIndex build_baseline(std::span<const Play> plays,
                             const TreeNode& root, int clusters,
                             std::uint64_t seed, CostMetric metric,
                             int kmeans_max_iterations = 100);

enum class Method { tree, baseline };

const char* to_string(Method method);
Method parse_method(std::string_view text);

struct Query {
  Play play;  // missing agents may be all-NaN trajectories
  // Agents of the query play, by position in its team ranges.
  AgentSubset selected;
  int k = 10;
  Method method = Method::tree;
  // Leaves searched; above 1, sibling leaves closest to the query are
  // searched as well.
  int probe_leaves = 1;
  // Score = distance / boost; boosts are >= 1.
  std::unordered_map<std::string, double> play_boosts;
  std::unordered_map<std::string, double> game_boosts;
};

struct RankedResult {
  std::string play_id;
  std::string game_id;
  double distance = 0.0;  // L2 over the selected aligned trajectories
  double score = 0.0;
  int rank = 0;  // 1-based
  int bucket = -1;
  // Query agent (position in its team) -> candidate agent.
  PermutationMap offense;
  PermutationMap defense;
};

struct QueryResult {
  std::vector<RankedResult> results;
  int window_seconds = 0;
  int leaf = -1;
  std::size_t candidates = 0;
  std::vector<int> imputed_offense;  // query agents filled from the template
  std::vector<int> imputed_defense;
};

QueryResult run_query(const PlayIndex& index, const Query& query);

// Candidate play reordered so agent i of each team corresponds to query
// agent i.
Play in_query_order(const Play& candidate, const RankedResult& result);

// Fills agents whose trajectories are entirely NaN with the template slot
// they are assigned to. Returns the filled agents per team.
std::pair<std::vector<int>, std::vector<int>> impute_missing_agents(
    Play& play, const TreeNode& root, CostMetric metric);

struct WindowStats {
  int window_seconds = 0;
  std::size_t plays = 0;
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  int depth = 0;
  std::size_t max_leaf_size = 0;
  std::size_t largest_leaf = 0;
  std::vector<std::size_t> leaf_sizes;  // per leaf, in node id order
  std::vector<double> layer_costs;
  int baseline_clusters = 0;
};

std::vector<WindowStats> index_stats(const PlayIndex& index);

}  // namespace playalign
