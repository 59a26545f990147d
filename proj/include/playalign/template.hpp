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
#include <span>
#include <vector>

#include "playalign/assignment.hpp"
#include "playalign/model.hpp"

namespace playalign {

struct TemplateLearnConfig {
  explicit TemplateLearnConfig(std::uint64_t seed) : rng_seed(seed) {}

  int max_iterations = 50;
  double convergence_threshold = 0.1;  // feet
  std::uint64_t rng_seed;
  CostMetric cost_metric = CostMetric::squared;
  TemplateGranularity granularity = TemplateGranularity::trajectory;
};

void validate(const TemplateLearnConfig& config);

// One team of many plays, item-major; each item is slot-major trajectories.
struct TeamBatch {
  int slots = 0;
  int frames = 0;
  std::vector<double> data;

  std::size_t item_length() const {
    return static_cast<std::size_t>(slots) * frames * 2;
  }
  std::size_t size() const {
    return item_length() == 0 ? 0 : data.size() / item_length();
  }
  std::span<const double> item(std::size_t i) const {
    return {data.data() + i * item_length(), item_length()};
  }
};

TeamBatch make_team_batch(std::span<const Play> plays, TeamScope team);

struct BatchTemplateResult {
  Template templ;
  std::vector<PermutationMap> permutations;
  std::vector<double> assignment_costs;  // per item, against `templ`
  // Sum of assignment costs after each alignment pass, the last entry being
  // the pass against the returned template.
  std::vector<double> objective_trace;
  int iterations = 0;
  double final_delta = 0.0;
};

BatchTemplateResult learn_template(const TeamBatch& batch, TeamScope team,
                                   const TemplateLearnConfig& config);

struct TemplateLearnResult {
  Template templ;
  std::vector<Play> aligned;
  std::vector<PermutationMap> permutations;
  std::vector<double> objective_trace;
  int iterations = 0;
  double final_delta = 0.0;
};

TemplateLearnResult learn_template(std::span<const Play> plays, TeamScope team,
                                   const TemplateLearnConfig& config);

// Mean over slots and frames of point displacement, in feet.
double template_delta(const Template& before, const Template& after);

// Aligns every item of `batch` to `templ`, writing per-item maps and costs.
void align_batch(const TeamBatch& batch, const Template& templ,
                 CostMetric metric, std::span<PermutationMap> perms,
                 std::span<double> costs);

}  // namespace playalign
