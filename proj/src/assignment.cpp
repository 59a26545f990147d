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

#include "playalign/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "playalign/errors.hpp"
#include "playalign/kernels.hpp"

namespace playalign {

const char* to_string(CostMetric metric) {
  return metric == CostMetric::squared ? "squared" : "euclidean";
}

CostMetric parse_cost_metric(std::string_view text) {
  if (text == "squared") return CostMetric::squared;
  if (text == "euclidean") return CostMetric::euclidean;
  throw InvalidArgument("unknown cost metric '" + std::string(text) + "'");
}

std::vector<double> team_trajectories(const Play& play, TeamScope team) {
  const AgentRange& r = play.team_split.range(team);
  const std::size_t frames = play.frame_count();
  const std::size_t stride = play.stride();
  std::vector<double> out(static_cast<std::size_t>(r.count) * frames * 2);
  for (int s = 0; s < r.count; ++s) {
    double* dst = out.data() + s * frames * 2;
    const double* src = play.coords.data() + 2 * (r.begin + s);
    for (std::size_t f = 0; f < frames; ++f) {
      dst[2 * f] = src[f * stride];
      dst[2 * f + 1] = src[f * stride + 1];
    }
  }
  return out;
}

void fill_cost_matrix(std::span<const double> slots,
                      std::span<const double> agents, int count, int frames,
                      CostMetric metric, CostMatrix& out) {
  const std::size_t len = static_cast<std::size_t>(frames) * 2;
  if (slots.size() != count * len || agents.size() != count * len) {
    throw DimensionError("cost matrix inputs do not match roster x frames");
  }
  if (out.size() != count) out = CostMatrix(count);
  const kernels::KernelTable& k = kernels::active();
  for (int m = 0; m < count; ++m) {
    const double* t = slots.data() + m * len;
    for (int n = 0; n < count; ++n) {
      const double* x = agents.data() + n * len;
      out(m, n) = metric == CostMetric::squared
                      ? k.squared_distance(t, x, len)
                      : k.point_distance_sum(t, x, frames);
    }
  }
}

std::vector<double> expand_template(const Template& templ, int frames) {
  if (templ.frames == frames) return templ.positions;
  if (templ.frames != 1) {
    throw DimensionError("template has " + std::to_string(templ.frames) +
                         " frames, play has " + std::to_string(frames));
  }
  std::vector<double> out(static_cast<std::size_t>(templ.slots) * frames * 2);
  for (int s = 0; s < templ.slots; ++s) {
    for (int f = 0; f < frames; ++f) {
      out[(s * frames + f) * 2] = templ.positions[2 * s];
      out[(s * frames + f) * 2 + 1] = templ.positions[2 * s + 1];
    }
  }
  return out;
}

CostMatrix build_cost_matrix(const Template& templ, const Play& play,
                             TeamScope team, CostMetric metric) {
  const AgentRange& r = play.team_split.range(team);
  if (templ.slots != r.count) {
    throw DimensionError("template has " + std::to_string(templ.slots) +
                         " slots, team has " + std::to_string(r.count) +
                         " agents");
  }
  const int frames = static_cast<int>(play.frame_count());
  const std::vector<double> slots = expand_template(templ, frames);
  const std::vector<double> agents = team_trajectories(play, team);
  CostMatrix out(r.count);
  fill_cost_matrix(slots, agents, r.count, frames, metric, out);
  return out;
}

namespace {

struct HungarianResult {
  std::vector<int> row_to_col;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
};

// Shortest augmenting path formulation with potentials, O(n^3). `at(i, j)`
// reads the (0-based) cost.
template <typename CostFn>
HungarianResult hungarian(int n, CostFn at) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  HungarianResult out;
  out.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) out.row_to_col[p[j] - 1] = j - 1;
  }
  out.u.assign(u.begin() + 1, u.end());
  out.v.assign(v.begin() + 1, v.end());
  return out;
}

double mapped_cost(const CostMatrix& cost, std::span<const int> mapping) {
  double total = 0.0;
  for (int m = 0; m < cost.size(); ++m) total += cost(m, mapping[m]);
  return total;
}

// Optimal completion of `prefix` (rows 0..prefix.size()-1 fixed).
std::vector<int> complete_prefix(const CostMatrix& cost,
                                 const std::vector<int>& prefix) {
  const int n = cost.size();
  const int fixed = static_cast<int>(prefix.size());
  std::vector<char> taken(n, 0);
  for (int c : prefix) taken[c] = 1;
  std::vector<int> free_cols;
  for (int c = 0; c < n; ++c) {
    if (!taken[c]) free_cols.push_back(c);
  }
  const int rest = n - fixed;
  std::vector<int> out = prefix;
  if (rest == 0) return out;
  const HungarianResult sub = hungarian(rest, [&](int i, int j) {
    return cost(fixed + i, free_cols[j]);
  });
  for (int i = 0; i < rest; ++i) out.push_back(free_cols[sub.row_to_col[i]]);
  return out;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
  const int n = cost.size();
  double scale = 0.0;
  for (double c : cost.entries()) {
    if (!std::isfinite(c)) {
      throw InvalidArgument("cost matrix has a non-finite entry");
    }
    scale = std::max(scale, std::abs(c));
  }
  if (n == 0) return {PermutationMap::identity(0), 0.0};

  HungarianResult h = hungarian(n, [&](int i, int j) { return cost(i, j); });
  std::vector<int> best = std::move(h.row_to_col);
  double best_cost = mapped_cost(cost, best);

  // Another optimum can only use entries whose reduced cost is zero.
  const double tol = 1e-9 * (1.0 + scale);
  bool may_tie = false;
  for (int i = 0; i < n && !may_tie; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != best[i] && cost(i, j) - h.u[i] - h.v[j] <= tol) {
        may_tie = true;
        break;
      }
    }
  }

  if (may_tie) {
    std::vector<int> prefix;
    for (int m = 0; m < n; ++m) {
      std::vector<char> taken(n, 0);
      for (int c : prefix) taken[c] = 1;
      for (int j = 0; j < best[m]; ++j) {
        if (taken[j]) continue;
        std::vector<int> trial = prefix;
        trial.push_back(j);
        std::vector<int> full = complete_prefix(cost, trial);
        const double c = mapped_cost(cost, full);
        if (c <= best_cost) {
          best = std::move(full);
          best_cost = c;
          break;
        }
      }
      prefix.push_back(best[m]);
    }
  }
  return {PermutationMap(std::move(best)), best_cost};
}

void permute_team_coords(std::span<double> coords, std::size_t stride,
                         const AgentRange& range, const PermutationMap& perm) {
  if (perm.size() != range.count) {
    throw DimensionError("permutation size does not match team size");
  }
  double scratch[64];
  std::vector<double> heap;
  double* buf = scratch;
  if (2 * range.count > 64) {
    heap.resize(2 * range.count);
    buf = heap.data();
  }
  const std::size_t frames = coords.size() / stride;
  for (std::size_t f = 0; f < frames; ++f) {
    double* block = coords.data() + f * stride + 2 * range.begin;
    std::copy(block, block + 2 * range.count, buf);
    for (int s = 0; s < range.count; ++s) {
      block[2 * s] = buf[2 * perm[s]];
      block[2 * s + 1] = buf[2 * perm[s] + 1];
    }
  }
}

Play apply_permutation(const Play& play, const PermutationMap& perm,
                       TeamScope team) {
  const AgentRange& r = play.team_split.range(team);
  Play out = play;
  permute_team_coords(out.coords, out.stride(), r, perm);
  auto permute_ids = [&](std::vector<int>& ids) {
    if (ids.empty()) return;
    std::vector<int> old(ids.begin() + r.begin, ids.begin() + r.begin + r.count);
    for (int s = 0; s < r.count; ++s) ids[r.begin + s] = old[perm[s]];
  };
  permute_ids(out.team_ids);
  permute_ids(out.player_ids);
  if (!out.actions.empty()) {
    const std::size_t row = play.agent_count() + 1;
    for (std::size_t f = 0; f < play.frame_count(); ++f) {
      int* a = out.actions.data() + f * row + r.begin;
      std::vector<int> old(a, a + r.count);
      for (int s = 0; s < r.count; ++s) a[s] = old[perm[s]];
    }
  }
  return out;
}

std::vector<PermutationMap> align_per_frame(const Template& templ,
                                            const Play& play, TeamScope team,
                                            CostMetric metric) {
  const AgentRange& r = play.team_split.range(team);
  if (templ.slots != r.count) {
    throw DimensionError("template slot count does not match team size");
  }
  const int frames = static_cast<int>(play.frame_count());
  const std::vector<double> slots = expand_template(templ, frames);
  std::vector<PermutationMap> out;
  out.reserve(frames);
  CostMatrix cost(r.count);
  for (int f = 0; f < frames; ++f) {
    for (int m = 0; m < r.count; ++m) {
      const double tx = slots[(m * frames + f) * 2];
      const double ty = slots[(m * frames + f) * 2 + 1];
      for (int n = 0; n < r.count; ++n) {
        const Vec2 p = play.agent(f, r.begin + n);
        const double d2 = (tx - p.x) * (tx - p.x) + (ty - p.y) * (ty - p.y);
        cost(m, n) = metric == CostMetric::squared ? d2 : std::sqrt(d2);
      }
    }
    out.push_back(solve_assignment(cost).mapping);
  }
  return out;
}

}  // namespace playalign
