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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "playalign/kmeans.hpp"
#include "playalign/model.hpp"
#include "playalign/tree.hpp"

namespace playalign {

// Mean Euclidean distance of each row to its cluster mean.
double within_cluster_error(const DataView& data, std::span<const int> labels,
                            int k);

// Share of total variance carried by each principal component, largest
// first. Empty when the data has no variance.
std::vector<double> variance_explained(const DataView& data);

// Relevance judgments keyed by query id. Unjudged items are not relevant.
class Judgments {
 public:
  void set(const std::string& query_id, const std::string& play_id,
           bool relevant);
  bool relevant(const std::string& query_id, const std::string& play_id) const;
  std::set<std::string> relevant_set(const std::string& query_id) const;
  std::vector<std::string> queries() const;

  // CSV with header `query_id,play_id,relevant` (relevant is 0 or 1).
  static Judgments read(std::istream& in);
  static Judgments load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::map<std::string, bool>> by_query_;
};

// Mean over the relevant retrieved items of precision at their rank. 0 when
// nothing in the ranking is relevant.
double average_precision(std::span<const std::string> ranking,
                         const std::set<std::string>& relevant);

// 1 / rank of the first relevant item; 0 when there is none.
double expected_reciprocal_rank(std::span<const std::string> ranking,
                                const std::set<std::string>& relevant);

// Rankings CSV: `query_id,method,rank,play_id`.
struct RankingRow {
  std::string query_id;
  std::string method;
  int rank = 0;
  std::string play_id;
};
std::map<std::string, std::map<std::string, std::vector<std::string>>>
read_rankings(std::istream& in);
void write_rankings(std::ostream& out, std::span<const RankingRow> rows);

enum class Team { a, b, both };

struct InterleavedItem {
  std::string play_id;
  Team credit = Team::a;
};

// Team-draft interleaving. While the lists agree on their next unseen item
// it is appended once and credited to both; otherwise `coin()` decides which
// list picks first this round (true = A) and each list contributes its next
// unseen item. Stops when either list runs out.
std::vector<InterleavedItem> team_draft_interleave(
    std::span<const std::string> a, std::span<const std::string> b,
    const std::function<bool()>& coin);
std::vector<InterleavedItem> team_draft_interleave(
    std::span<const std::string> a, std::span<const std::string> b,
    std::uint64_t seed);

struct InterleaveOutcome {
  int a_wins = 0;  // relevant items credited to A only
  int b_wins = 0;
  int shared = 0;  // relevant items credited to both
};
InterleaveOutcome interleave_outcome(std::span<const InterleavedItem> items,
                                     const std::set<std::string>& relevant);

struct CompressibilityConfig {
  std::vector<int> k_values{5, 10, 20};
  int components = 10;
  int restarts = 3;
  int kmeans_max_iterations = 100;
  std::uint64_t seed = 0;
};

struct AlignmentCurves {
  std::string alignment;  // identity, role or tree
  std::vector<std::pair<int, double>> wce;
  std::vector<double> variance;  // first `components` ratios
  double cumulative_variance = 0.0;  // sum of `variance`
};

struct CompressibilityReport {
  std::vector<AlignmentCurves> alignments;

  const AlignmentCurves& at(const std::string& alignment) const;
  void write_wce_csv(std::ostream& out) const;       // alignment,k,wce
  void write_variance_csv(std::ostream& out) const;  // alignment,component,ratio
};

// Clustering error and PCA spectra of the corpus flattened with no
// alignment, aligned to the root templates, and aligned through the tree.
CompressibilityReport compressibility_report(std::span<const Play> plays,
                                             const AlignmentTree& tree,
                                             const CompressibilityConfig& config);

}  // namespace playalign
