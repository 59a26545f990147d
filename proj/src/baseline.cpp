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

#include "playalign/errors.hpp"
#include "playalign/kmeans.hpp"
#include "playalign/retrieval.hpp"
#include "playalign/util.hpp"

namespace playalign {

BaselineIndex build_baseline(std::span<const Play> plays, const TreeNode& root,
                             int clusters, std::uint64_t seed,
                             CostMetric metric, int kmeans_max_iterations) {
  if (plays.empty()) throw InvalidArgument("baseline: no plays");
  if (clusters < 1) throw InvalidArgument("baseline: clusters must be >= 1");
  BaselineIndex out;
  out.offense = root.offense;
  out.defense = root.defense;
  const AgentSubset ball = AgentSubset::ball_only();
  out.dim = flattened_size(plays.front(), ball);
  std::vector<double> rows(plays.size() * out.dim);
  std::vector<PermutationMap> off(plays.size()), def(plays.size());
  parallel_for(plays.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      flatten_into(plays[i], ball,
                   std::span<double>(rows.data() + i * out.dim, out.dim));
      Play p = plays[i];
      off[i] = align_team(p, root.offense, TeamScope::offense, metric);
      def[i] = align_team(p, root.defense, TeamScope::defense, metric);
    }
  });

  const DataView view = DataView::dense(rows, out.dim);
  std::optional<KMeansResult> km;
  for (int k = std::min<int>(clusters, static_cast<int>(plays.size())); k >= 1;
       --k) {
    km = kmeans(view, {k, kmeans_max_iterations, derive_seed(seed, 0xba11)});
    if (km) break;
  }
  out.clusters = km->k;
  out.centroids = std::move(km->centroids);
  out.buckets.resize(out.clusters);
  for (std::size_t i = 0; i < plays.size(); ++i) {
    out.buckets[km->labels[i]].push_back(
        {plays[i].play_id, std::move(off[i]), std::move(def[i]), nullptr});
  }
  return out;
}

}  // namespace playalign
