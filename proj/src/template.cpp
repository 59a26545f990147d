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

#include "playalign/template.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "playalign/errors.hpp"
#include "playalign/kernels.hpp"
#include "playalign/util.hpp"

namespace playalign {

void validate(const TemplateLearnConfig& config) {
  if (config.max_iterations < 1) {
    throw InvalidArgument("template learning needs max_iterations >= 1");
  }
  if (!(config.convergence_threshold > 0.0)) {
    throw InvalidArgument("template convergence threshold must be > 0");
  }
}

TeamBatch make_team_batch(std::span<const Play> plays, TeamScope team) {
  TeamBatch batch;
  if (plays.empty()) return batch;
  batch.slots = plays.front().team_split.range(team).count;
  batch.frames = static_cast<int>(plays.front().frame_count());
  batch.data.reserve(plays.size() * batch.item_length());
  for (const Play& p : plays) {
    if (p.team_split.range(team).count != batch.slots ||
        static_cast<int>(p.frame_count()) != batch.frames) {
      throw DimensionError("play " + p.play_id +
                           " does not match the batch roster/frame count");
    }
    const std::vector<double> t = team_trajectories(p, team);
    batch.data.insert(batch.data.end(), t.begin(), t.end());
  }
  return batch;
}

double template_delta(const Template& before, const Template& after) {
  if (before.slots != after.slots || before.frames != after.frames ||
      before.positions.size() != after.positions.size()) {
    throw DimensionError("template_delta: shape mismatch");
  }
  const std::size_t points = before.positions.size() / 2;
  if (points == 0) return 0.0;
  const double total = kernels::point_distance_sum(before.positions,
                                                   after.positions);
  return total / static_cast<double>(points);
}

void align_batch(const TeamBatch& batch, const Template& templ,
                 CostMetric metric, std::span<PermutationMap> perms,
                 std::span<double> costs) {
  if (templ.slots != batch.slots) {
    throw DimensionError("template slot count does not match the batch");
  }
  const std::vector<double> slots = expand_template(templ, batch.frames);
  parallel_for(batch.size(), [&](std::size_t begin, std::size_t end) {
    CostMatrix cost(batch.slots);
    for (std::size_t i = begin; i < end; ++i) {
      fill_cost_matrix(slots, batch.item(i), batch.slots, batch.frames, metric,
                       cost);
      Assignment a = solve_assignment(cost);
      perms[i] = std::move(a.mapping);
      costs[i] = a.total_cost;
    }
  });
}

namespace {

Template template_from_item(std::span<const double> item, TeamScope team,
                            int slots, int frames,
                            TemplateGranularity granularity) {
  Template t;
  t.team = team;
  t.slots = slots;
  if (granularity == TemplateGranularity::trajectory) {
    t.frames = frames;
    t.positions.assign(item.begin(), item.end());
    return t;
  }
  t.frames = 1;
  t.positions.assign(2 * slots, 0.0);
  for (int s = 0; s < slots; ++s) {
    double sx = 0.0, sy = 0.0;
    for (int f = 0; f < frames; ++f) {
      sx += item[(s * frames + f) * 2];
      sy += item[(s * frames + f) * 2 + 1];
    }
    t.positions[2 * s] = sx / frames;
    t.positions[2 * s + 1] = sy / frames;
  }
  return t;
}

// Per-slot mean of the aligned items, accumulated in item order.
Template mean_template(const TeamBatch& batch,
                       std::span<const PermutationMap> perms, TeamScope team,
                       TemplateGranularity granularity) {
  const int slots = batch.slots;
  const int frames = batch.frames;
  const std::size_t slot_len = static_cast<std::size_t>(frames) * 2;
  std::vector<double> sum(batch.item_length(), 0.0);
  const kernels::KernelTable& k = kernels::active();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double* item = batch.item(i).data();
    for (int s = 0; s < slots; ++s) {
      k.accumulate(sum.data() + s * slot_len, item + perms[i][s] * slot_len,
                   slot_len);
    }
  }
  const double n = static_cast<double>(batch.size());
  for (double& v : sum) v /= n;
  return template_from_item(sum, team, slots, frames, granularity);
}

double sum_in_order(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace

BatchTemplateResult learn_template(const TeamBatch& batch, TeamScope team,
                                   const TemplateLearnConfig& config) {
  validate(config);
  const std::size_t n = batch.size();
  if (n == 0) throw InvalidArgument("learn_template: empty play set");

  BatchTemplateResult out;
  out.permutations.assign(n, PermutationMap::identity(batch.slots));
  out.assignment_costs.assign(n, 0.0);

  if (n == 1) {
    out.templ = template_from_item(batch.item(0), team, batch.slots,
                                   batch.frames, config.granularity);
    align_batch(batch, out.templ, config.cost_metric, out.permutations,
                out.assignment_costs);
    // A single play is its own template under the identity ordering.
    if (config.granularity == TemplateGranularity::trajectory) {
      out.permutations[0] = PermutationMap::identity(batch.slots);
      out.assignment_costs[0] = 0.0;
    }
    out.objective_trace.push_back(sum_in_order(out.assignment_costs));
    return out;
  }

  // Seeded choice of the initial example that does not depend on the order
  // of the input set: the item with the smallest content hash.
  std::size_t init = 0;
  std::uint64_t best_hash = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t h = hash_values(batch.item(i), config.rng_seed);
    if (h < best_hash) {
      best_hash = h;
      init = i;
    }
  }
  Template templ = template_from_item(batch.item(init), team, batch.slots,
                                      batch.frames, config.granularity);

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    align_batch(batch, templ, config.cost_metric, out.permutations,
                out.assignment_costs);
    out.objective_trace.push_back(sum_in_order(out.assignment_costs));
    Template next = mean_template(batch, out.permutations, team,
                                  config.granularity);
    out.final_delta = template_delta(templ, next);
    templ = std::move(next);
    out.iterations = iter;
    if (out.final_delta < config.convergence_threshold) break;
  }

  align_batch(batch, templ, config.cost_metric, out.permutations,
              out.assignment_costs);
  out.objective_trace.push_back(sum_in_order(out.assignment_costs));
  out.templ = std::move(templ);
  return out;
}

TemplateLearnResult learn_template(std::span<const Play> plays, TeamScope team,
                                   const TemplateLearnConfig& config) {
  if (plays.empty()) throw InvalidArgument("learn_template: empty play set");
  const TeamBatch batch = make_team_batch(plays, team);
  BatchTemplateResult r = learn_template(batch, team, config);
  TemplateLearnResult out;
  out.aligned.reserve(plays.size());
  for (std::size_t i = 0; i < plays.size(); ++i) {
    out.aligned.push_back(apply_permutation(plays[i], r.permutations[i], team));
  }
  out.templ = std::move(r.templ);
  out.permutations = std::move(r.permutations);
  out.objective_trace = std::move(r.objective_trace);
  out.iterations = r.iterations;
  out.final_delta = r.final_delta;
  return out;
}

}  // namespace playalign
