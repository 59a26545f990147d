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

#include <span>
#include <string_view>
#include <vector>

#include "playalign/model.hpp"

namespace playalign {

enum class CostMetric { euclidean, squared };

const char* to_string(CostMetric metric);
CostMetric parse_cost_metric(std::string_view text);

// Slot-major (x, y) trajectories of one team: agent s occupies
// [s * frames * 2, (s + 1) * frames * 2).
std::vector<double> team_trajectories(const Play& play, TeamScope team);

// Entry (m, n) accumulates, over all frames, the distance between slot m of
// `slots` and agent n of `agents`: per-frame Euclidean distances for
// `euclidean`, per-frame squared distances for `squared`. Both inputs are
// slot-major with `count` trajectories of `frames` points.
void fill_cost_matrix(std::span<const double> slots,
                      std::span<const double> agents, int count, int frames,
                      CostMetric metric, CostMatrix& out);

CostMatrix build_cost_matrix(const Template& templ, const Play& play,
                             TeamScope team, CostMetric metric);

// Expands a mean-position template to `frames` copies of each slot point;
// trajectory templates are returned unchanged.
std::vector<double> expand_template(const Template& templ, int frames);

struct Assignment {
  PermutationMap mapping;  // mapping[row] = assigned column
  double total_cost = 0.0;
};

// Exact minimum-cost perfect matching (Hungarian method). Among optimal
// matchings the lexicographically smallest mapping is returned. total_cost
// is summed in row order from the matrix entries.
Assignment solve_assignment(const CostMatrix& cost);

Play apply_permutation(const Play& play, const PermutationMap& perm,
                       TeamScope team);

// Reorders one team's block of a frame-major coordinate buffer in place.
void permute_team_coords(std::span<double> coords, std::size_t stride,
                         const AgentRange& range, const PermutationMap& perm);

// One assignment per frame, for occupancy heat maps; retrieval and template
// learning always use whole-window assignment.
std::vector<PermutationMap> align_per_frame(const Template& templ,
                                            const Play& play, TeamScope team,
                                            CostMetric metric);

}  // namespace playalign
