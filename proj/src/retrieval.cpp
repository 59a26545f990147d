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

#include "playalign/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "playalign/errors.hpp"
#include "playalign/kernels.hpp"

namespace playalign {

const char* to_string(Method method) {
  return method == Method::tree ? "tree" : "baseline";
}

Method parse_method(std::string_view text) {
  if (text == "tree") return Method::tree;
  if (text == "baseline") return Method::baseline;
  throw InvalidArgument("unknown retrieval method '" + std::string(text) +
                        "' (expected tree or baseline)");
}

const WindowIndex* PlayIndex::window(int window_seconds) const {
  const auto it = windows_.find(window_seconds);
  return it == windows_.end() ? nullptr : &it->second;
}

void PlayIndex::add_window(WindowIndex window) {
  const int w = window.window_seconds;
  windows_.insert_or_assign(w, std::move(window));
}

std::size_t PlayIndex::play_count() const {
  std::size_t n = 0;
  for (const auto& [w, win] : windows_) {
    for (const auto& [leaf, entries] : win.buckets) n += entries.size();
  }
  return n;
}

void PlayIndex::attach(std::shared_ptr<const PlayStore> store) {
  if (!store) throw InvalidArgument("attach: null play store");
  auto resolve = [&](HashEntry& e, int window) {
    e.play = store->find(e.play_id);
    if (e.play == nullptr) {
      throw NotFound("play " + e.play_id + " is indexed but not in the store");
    }
    if (e.play->window_seconds != window) {
      throw InvalidArgument("play " + e.play_id + " has a " +
                            std::to_string(e.play->window_seconds) +
                            " s window in the store");
    }
  };
  for (auto& [w, win] : windows_) {
    for (auto& [leaf, entries] : win.buckets) {
      for (HashEntry& e : entries) resolve(e, w);
    }
    if (win.baseline) {
      for (auto& bucket : win.baseline->buckets) {
        for (HashEntry& e : bucket) resolve(e, w);
      }
    }
  }
  store_ = std::move(store);
}

PlayIndex build_index(std::shared_ptr<const PlayStore> store,
                      const IndexConfig& config) {
  if (!store || store->empty()) throw InvalidArgument("build_index: no plays");
  validate(config.tree);
  PlayIndex index;
  const std::vector<int> lengths = store->window_lengths();
  for (int w : lengths) {
    if (!config.windows.empty() && !config.windows.contains(w)) continue;
    std::vector<Play> subset;
    std::span<const Play> plays = store->plays();
    if (lengths.size() > 1) {
      subset = store->with_window(w);
      plays = subset;
    }
    TreeBuildResult built = build_tree(plays, config.tree);
    WindowIndex win;
    win.window_seconds = w;
    for (std::size_t i = 0; i < plays.size(); ++i) {
      PlayPlacement& p = built.placements[i];
      win.buckets[p.leaf].push_back({plays[i].play_id, std::move(p.offense),
                                     std::move(p.defense), nullptr});
    }
    if (config.with_baseline) {
      win.baseline = build_baseline(
          plays, built.tree.root(), static_cast<int>(built.tree.leaf_count()),
          config.tree.rng_seed, config.tree.templates.cost_metric,
          config.tree.kmeans_max_iterations);
    }
    win.tree = std::move(built.tree);
    index.add_window(std::move(win));
  }
  if (index.windows().empty()) {
    throw InvalidArgument("build_index: no plays with the requested windows");
  }
  index.attach(std::move(store));
  return index;
}

std::pair<std::vector<int>, std::vector<int>> impute_missing_agents(
    Play& play, const TreeNode& root, CostMetric metric) {
  std::pair<std::vector<int>, std::vector<int>> filled;
  const std::size_t frames = play.frame_count();
  const std::size_t stride = play.stride();
  const int n = play.agent_count();
  for (std::size_t f = 0; f < frames; ++f) {
    const double* b = play.coords.data() + f * stride + 2 * n;
    if (!std::isfinite(b[0]) || !std::isfinite(b[1]) || !std::isfinite(b[2])) {
      throw InvalidArgument("the query ball trajectory has missing samples");
    }
  }
  for (TeamScope team : {TeamScope::offense, TeamScope::defense}) {
    const AgentRange& r = play.team_split.range(team);
    const Template& templ = team == TeamScope::offense ? root.offense
                                                       : root.defense;
    std::vector<char> missing(r.count, 0);
    bool any = false;
    for (int a = 0; a < r.count; ++a) {
      std::size_t bad = 0;
      for (std::size_t f = 0; f < frames; ++f) {
        const double* p = play.coords.data() + f * stride + 2 * (r.begin + a);
        if (!std::isfinite(p[0]) || !std::isfinite(p[1])) ++bad;
      }
      if (bad == frames && frames > 0) {
        missing[a] = 1;
        any = true;
      } else if (bad != 0) {
        throw InvalidArgument(std::string(to_string(team)) + " agent " +
                              std::to_string(a) +
                              " has a partially missing trajectory");
      }
    }
    if (!any) continue;
    const int fr = static_cast<int>(frames);
    const std::vector<double> slots = expand_template(templ, fr);
    std::vector<double> agents = team_trajectories(play, team);
    CostMatrix cost(r.count);
    for (int a = 0; a < r.count; ++a) {
      if (missing[a]) std::fill_n(agents.begin() + a * fr * 2, fr * 2, 0.0);
    }
    fill_cost_matrix(slots, agents, r.count, fr, metric, cost);
    // A missing agent fits any slot equally well.
    for (int s = 0; s < r.count; ++s) {
      for (int a = 0; a < r.count; ++a) {
        if (missing[a]) cost(s, a) = 0.0;
      }
    }
    const Assignment asg = solve_assignment(cost);
    std::vector<int>& out = team == TeamScope::offense ? filled.first
                                                       : filled.second;
    for (int s = 0; s < r.count; ++s) {
      const int a = asg.mapping[s];
      if (!missing[a]) continue;
      out.push_back(a);
      for (std::size_t f = 0; f < frames; ++f) {
        double* p = play.coords.data() + f * stride + 2 * (r.begin + a);
        const std::size_t tf = templ.frames == 1 ? 0 : f;
        const Vec2 v = templ.position(s, static_cast<int>(tf));
        p[0] = v.x;
        p[1] = v.y;
      }
    }
    std::sort(out.begin(), out.end());
  }
  return filled;
}

namespace {

struct SlotSelection {
  std::vector<int> offense;  // aligned slots, ascending
  std::vector<int> defense;
  bool ball = false;

  std::size_t values_per_frame() const {
    return 2 * (offense.size() + defense.size()) + (ball ? 3 : 0);
  }
};

SlotSelection select_slots(const AgentSubset& selected,
                           const PermutationMap& offense,
                           const PermutationMap& defense) {
  SlotSelection s;
  for (int i = 0; i < offense.size(); ++i) {
    if ((selected.offense >> offense[i]) & 1u) s.offense.push_back(i);
  }
  for (int i = 0; i < defense.size(); ++i) {
    if ((selected.defense >> defense[i]) & 1u) s.defense.push_back(i);
  }
  s.ball = selected.ball;
  return s;
}

// Selected aligned trajectories of `raw` seen through slot -> agent maps,
// in the flatten() layout.
void gather(const Play& raw, const PermutationMap& offense,
            const PermutationMap& defense, const SlotSelection& sel,
            double* out) {
  const std::size_t stride = raw.stride();
  const int ob = raw.team_split.offense.begin;
  const int db = raw.team_split.defense.begin;
  const int n = raw.agent_count();
  for (std::size_t f = 0; f < raw.frame_count(); ++f) {
    const double* row = raw.coords.data() + f * stride;
    for (int s : sel.offense) {
      const int a = ob + offense[s];
      *out++ = row[2 * a];
      *out++ = row[2 * a + 1];
    }
    for (int s : sel.defense) {
      const int a = db + defense[s];
      *out++ = row[2 * a];
      *out++ = row[2 * a + 1];
    }
    if (sel.ball) {
      *out++ = row[2 * n];
      *out++ = row[2 * n + 1];
      *out++ = row[2 * n + 2];
    }
  }
}

struct Probe {
  int bucket = -1;
  const std::vector<HashEntry>* entries = nullptr;
  PermutationMap offense;  // aligned slot -> query agent
  PermutationMap defense;
  Play aligned;
};

void check_query(const Query& q, const WindowIndex& win) {
  if (q.k < 1) throw InvalidArgument("k must be >= 1");
  if (q.probe_leaves < 1) throw InvalidArgument("probe_leaves must be >= 1");
  if (q.selected.empty()) throw InvalidArgument("no agents selected");
  const int m = win.tree.agents_per_team;
  const std::uint32_t full = (1u << m) - 1u;
  if ((q.selected.offense & ~full) != 0 || (q.selected.defense & ~full) != 0) {
    throw InvalidArgument("selected agent outside the roster");
  }
  if (q.play.team_split != TeamSplit::standard(m)) {
    throw DimensionError("query roster does not match the index (" +
                         std::to_string(m) + " agents per team)");
  }
  if (static_cast<int>(q.play.frame_count()) != win.tree.frames ||
      q.play.coords.size() != q.play.frame_count() * q.play.stride()) {
    throw DimensionError("query has " + std::to_string(q.play.frame_count()) +
                         " frames; the " +
                         std::to_string(win.window_seconds) +
                         " s index expects " + std::to_string(win.tree.frames));
  }
  for (const auto* boosts : {&q.play_boosts, &q.game_boosts}) {
    for (const auto& [id, b] : *boosts) {
      if (!(b >= 1.0) || !std::isfinite(b)) {
        throw InvalidArgument("boost for " + id + " must be a finite value >= 1");
      }
    }
  }
}

std::vector<Probe> tree_probes(const Play& q, const WindowIndex& win,
                               int probe_leaves) {
  const AlignmentTree& tree = win.tree;
  const CostMetric metric = tree.config.templates.cost_metric;
  TreeAlignment ta = align_with_tree(q, tree);
  std::vector<Probe> probes;
  auto bucket_of = [&](int leaf) -> const std::vector<HashEntry>* {
    const auto it = win.buckets.find(leaf);
    return it == win.buckets.end() ? nullptr : &it->second;
  };
  probes.push_back({ta.leaf, bucket_of(ta.leaf), ta.offense, ta.defense,
                    std::move(ta.aligned)});
  if (probe_leaves <= 1 || ta.path.size() < 2) return probes;

  // Query state aligned down to the leaf's parent.
  Play state = q;
  PermutationMap off = PermutationMap::identity(tree.agents_per_team);
  PermutationMap def = off;
  for (std::size_t i = 0; i + 1 < ta.path.size(); ++i) {
    const TreeNode& node = tree.nodes[ta.path[i]];
    off = compose(off, align_team(state, node.offense, TeamScope::offense, metric));
    def = compose(def, align_team(state, node.defense, TeamScope::defense, metric));
  }
  const TreeNode& parent = tree.nodes[ta.path[ta.path.size() - 2]];
  std::vector<std::pair<double, int>> order;
  const kernels::KernelTable& kt = kernels::active();
  for (const ChildLink& c : parent.children) {
    if (c.node == ta.leaf || !tree.nodes[c.node].is_leaf()) continue;
    order.emplace_back(kt.squared_distance(state.coords.data(),
                                           c.centroid.data(),
                                           state.coords.size()),
                       c.node);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [d, leaf] : order) {
    if (static_cast<int>(probes.size()) >= probe_leaves) break;
    const TreeNode& node = tree.nodes[leaf];
    Play aligned = state;
    PermutationMap o = compose(
        off, align_team(aligned, node.offense, TeamScope::offense, metric));
    PermutationMap p = compose(
        def, align_team(aligned, node.defense, TeamScope::defense, metric));
    probes.push_back({leaf, bucket_of(leaf), std::move(o), std::move(p),
                      std::move(aligned)});
  }
  return probes;
}

std::vector<Probe> baseline_probe(const Play& q, const WindowIndex& win) {
  if (!win.baseline) {
    throw InvalidArgument("the index was built without the baseline method");
  }
  const BaselineIndex& bl = *win.baseline;
  const CostMetric metric = win.tree.config.templates.cost_metric;
  Probe p;
  p.aligned = q;
  p.offense = align_team(p.aligned, bl.offense, TeamScope::offense, metric);
  p.defense = align_team(p.aligned, bl.defense, TeamScope::defense, metric);
  const std::vector<double> ball = flatten(q, AgentSubset::ball_only());
  p.bucket = nearest_centroid(ball, bl.centroids, bl.clusters);
  p.entries = &bl.buckets[p.bucket];
  return {std::move(p)};
}

}  // namespace

QueryResult run_query(const PlayIndex& index, const Query& query) {
  const WindowIndex* win = index.window(query.play.window_seconds);
  if (win == nullptr) {
    throw InvalidArgument("no index for " +
                          std::to_string(query.play.window_seconds) +
                          " s windows");
  }
  check_query(query, *win);
  if (index.store() == nullptr) {
    throw InvalidArgument("the index has no play store attached");
  }
  if (query.method == Method::baseline && !query.selected.ball) {
    throw InvalidArgument("the baseline method needs the ball in the selection");
  }

  QueryResult out;
  out.window_seconds = win->window_seconds;
  Play q = query.play;
  const CostMetric metric = win->tree.config.templates.cost_metric;
  std::tie(out.imputed_offense, out.imputed_defense) =
      impute_missing_agents(q, win->tree.root(), metric);
  for (int a : out.imputed_offense) {
    if ((query.selected.offense >> a) & 1u) {
      throw InvalidArgument("selected offense agent " + std::to_string(a) +
                            " has no trajectory");
    }
  }
  for (int a : out.imputed_defense) {
    if ((query.selected.defense >> a) & 1u) {
      throw InvalidArgument("selected defense agent " + std::to_string(a) +
                            " has no trajectory");
    }
  }

  std::vector<Probe> probes = query.method == Method::tree
                                  ? tree_probes(q, *win, query.probe_leaves)
                                  : baseline_probe(q, *win);
  out.leaf = probes.front().bucket;

  const kernels::KernelTable& kt = kernels::active();
  std::vector<RankedResult> ranked;
  for (const Probe& probe : probes) {
    if (probe.entries == nullptr) continue;
    const SlotSelection sel =
        select_slots(query.selected, probe.offense, probe.defense);
    const std::size_t len = sel.values_per_frame() * q.frame_count();
    const PermutationMap id = PermutationMap::identity(probe.offense.size());
    std::vector<double> qv(len), cv(len);
    gather(probe.aligned, id, id, sel, qv.data());
    const PermutationMap inv_off = probe.offense.inverse();
    const PermutationMap inv_def = probe.defense.inverse();
    for (const HashEntry& e : *probe.entries) {
      gather(*e.play, e.offense, e.defense, sel, cv.data());
      RankedResult r;
      r.play_id = e.play_id;
      r.game_id = e.play->game_id;
      r.distance = std::sqrt(kt.squared_distance(qv.data(), cv.data(), len));
      r.bucket = probe.bucket;
      r.offense = compose(e.offense, inv_off);
      r.defense = compose(e.defense, inv_def);
      ranked.push_back(std::move(r));
    }
  }
  out.candidates = ranked.size();

  std::sort(ranked.begin(), ranked.end(),
            [](const RankedResult& a, const RankedResult& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              return a.play_id < b.play_id;
            });
  for (RankedResult& r : ranked) {
    double boost = 1.0;
    if (const auto it = query.play_boosts.find(r.play_id);
        it != query.play_boosts.end()) {
      boost *= it->second;
    }
    if (const auto it = query.game_boosts.find(r.game_id);
        it != query.game_boosts.end()) {
      boost *= it->second;
    }
    r.score = r.distance / boost;
  }
  if (!query.play_boosts.empty() || !query.game_boosts.empty()) {
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedResult& a, const RankedResult& b) {
                       return a.score < b.score;
                     });
  }
  if (ranked.size() > static_cast<std::size_t>(query.k)) {
    ranked.resize(query.k);
  }
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    ranked[i].rank = static_cast<int>(i) + 1;
  }
  out.results = std::move(ranked);
  return out;
}

Play in_query_order(const Play& candidate, const RankedResult& result) {
  Play p = apply_permutation(candidate, result.offense, TeamScope::offense);
  return apply_permutation(p, result.defense, TeamScope::defense);
}

std::vector<WindowStats> index_stats(const PlayIndex& index) {
  std::vector<WindowStats> out;
  for (const auto& [w, win] : index.windows()) {
    WindowStats s;
    s.window_seconds = w;
    s.nodes = win.tree.nodes.size();
    s.leaves = win.tree.leaf_count();
    s.depth = win.tree.depth();
    s.max_leaf_size = win.tree.config.max_leaf_size;
    for (const auto& [leaf, entries] : win.buckets) {
      s.plays += entries.size();
      s.leaf_sizes.push_back(entries.size());
      s.largest_leaf = std::max(s.largest_leaf, entries.size());
    }
    s.layer_costs = win.tree.layer_costs;
    s.baseline_clusters = win.baseline ? win.baseline->clusters : 0;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace playalign
