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

#include "playalign/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "playalign/errors.hpp"
#include "playalign/kernels.hpp"
#include "playalign/util.hpp"

namespace playalign {

void validate(const TreeConfig& config) {
  if (config.k_min < 2 || config.k_max < config.k_min) {
    throw InvalidArgument("tree k range must satisfy 2 <= k_min <= k_max");
  }
  if (config.max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (config.max_leaf_size < 1) {
    throw InvalidArgument("max_leaf_size must be >= 1");
  }
  validate(config.templates);
}

std::size_t AlignmentTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::vector<int> AlignmentTree::leaf_ids() const {
  std::vector<int> out;
  for (const TreeNode& n : nodes) {
    if (n.is_leaf()) out.push_back(n.id);
  }
  return out;
}

int AlignmentTree::depth() const {
  int d = 0;
  for (const TreeNode& n : nodes) d = std::max(d, n.layer + 1);
  return d;
}

namespace {

double metric_distance(const double* a, const double* b, std::size_t dim,
                       CostMetric metric) {
  const double d2 = kernels::active().squared_distance(a, b, dim);
  return metric == CostMetric::squared ? d2 : std::sqrt(d2);
}

}  // namespace

double partition_score(const DataView& data, std::span<const int> labels,
                       std::span<const double> means, int k,
                       CostMetric metric) {
  if (k < 2) throw InvalidArgument("partition_score needs K >= 2");
  if (labels.size() != data.count || data.count == 0) {
    throw DimensionError("partition_score: labels do not match the data");
  }
  std::vector<std::size_t> counts(k, 0);
  for (int l : labels) {
    if (l < 0 || l >= k) throw InvalidArgument("label outside [0, K)");
    ++counts[l];
  }
  if (std::find(counts.begin(), counts.end(), 0u) != counts.end()) {
    throw InvalidArgument("partition_score: empty cluster");
  }
  std::vector<double> contrib(data.count);
  parallel_for(data.count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double* x = data.row(i);
      const int own = labels[i];
      const double d_own =
          metric_distance(x, means.data() + own * data.dim, data.dim, metric);
      double d_nb = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (c == own) continue;
        d_nb = std::min(d_nb, metric_distance(x, means.data() + c * data.dim,
                                              data.dim, metric));
      }
      if (d_nb > 0.0) {
        contrib[i] = (d_nb - d_own) / d_nb;
      } else {
        contrib[i] = d_own > 0.0 ? -1.0 : 0.0;
      }
    }
  }, 16);
  double total = 0.0;
  for (double c : contrib) total += c;
  return total / static_cast<double>(data.count);
}

double partition_score(const DataView& data, std::span<const int> labels,
                       int k, CostMetric metric) {
  const std::vector<double> means = cluster_means(data, labels, k);
  return partition_score(data, labels, means, k, metric);
}

std::optional<Partition> choose_partition(const DataView& data, int k_min,
                                          int k_max, std::uint64_t seed,
                                          CostMetric metric,
                                          int kmeans_max_iterations) {
  if (k_min < 2 || k_max < k_min) {
    throw InvalidArgument("choose_partition: invalid K range");
  }
  std::optional<Partition> best;
  std::vector<std::pair<int, double>> scores;
  const int k_cap = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(k_max), data.count));
  for (int k = k_min; k <= k_cap; ++k) {
    KMeansConfig kc;
    kc.k = k;
    kc.max_iterations = kmeans_max_iterations;
    kc.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    std::optional<KMeansResult> km = kmeans(data, kc);
    // A clustering that lost clusters is the same as a smaller K.
    if (!km || km->k != k) continue;
    const std::vector<double> means = cluster_means(data, km->labels, k);
    const double e = partition_score(data, km->labels, means, k, metric);
    scores.emplace_back(k, e);
    if (!best || e > best->score) {
      best = Partition{k, std::move(km->centroids), std::move(km->labels), e,
                       {}};
    }
  }
  if (best) best->scores = std::move(scores);
  return best;
}

PermutationMap align_team(Play& play, const Template& templ, TeamScope team,
                          CostMetric metric, double* cost) {
  const AgentRange& r = play.team_split.range(team);
  if (templ.slots != r.count) {
    throw DimensionError("template slot count does not match team size");
  }
  const int frames = static_cast<int>(play.frame_count());
  const std::vector<double> slots = expand_template(templ, frames);
  const std::vector<double> agents = team_trajectories(play, team);
  CostMatrix cm(r.count);
  fill_cost_matrix(slots, agents, r.count, frames, metric, cm);
  Assignment a = solve_assignment(cm);
  permute_team_coords(play.coords, play.stride(), r, a.mapping);
  if (cost != nullptr) *cost = a.total_cost;
  return a.mapping;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const Play> plays, const TreeConfig& config)
      : plays_(plays), config_(config) {}

  TreeBuildResult run();

 private:
  void process(int node_id, std::vector<std::uint32_t> rows);
  TeamBatch extract(const std::vector<std::uint32_t>& rows,
                    TeamScope team) const;
  Template learn_node_template(int node_id, TeamScope team,
                               const std::vector<std::uint32_t>& rows);
  double node_cost(int node_id, const std::vector<std::uint32_t>& rows) const;

  std::span<const Play> plays_;
  const TreeConfig& config_;
  std::size_t dim_ = 0;
  std::size_t stride_ = 0;
  int frames_ = 0;
  TeamSplit split_;
  std::vector<double> aligned_;
  std::vector<PermutationMap> comp_offense_;
  std::vector<PermutationMap> comp_defense_;
  std::deque<std::pair<int, std::vector<std::uint32_t>>> queue_;
  TreeBuildResult result_;
};

TeamBatch TreeBuilder::extract(const std::vector<std::uint32_t>& rows,
                               TeamScope team) const {
  const AgentRange& r = split_.range(team);
  TeamBatch batch;
  batch.slots = r.count;
  batch.frames = frames_;
  batch.data.resize(rows.size() * batch.item_length());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = aligned_.data() + rows[i] * dim_;
    double* dst = batch.data.data() + i * batch.item_length();
    for (int s = 0; s < r.count; ++s) {
      for (int f = 0; f < frames_; ++f) {
        dst[(s * frames_ + f) * 2] = src[f * stride_ + 2 * (r.begin + s)];
        dst[(s * frames_ + f) * 2 + 1] =
            src[f * stride_ + 2 * (r.begin + s) + 1];
      }
    }
  }
  return batch;
}

double TreeBuilder::node_cost(int node_id,
                              const std::vector<std::uint32_t>& rows) const {
  const DataView view = DataView::indexed(aligned_, dim_, rows);
  const std::size_t n = rows.size();
  if (n < 2) return 0.0;
  const kernels::KernelTable& kt = kernels::active();
  if (config_.templates.cost_metric == CostMetric::squared) {
    // sum_{i,j} ||x_i - x_j||^2 = 2 n sum_i ||x_i - mean||^2
    std::vector<int> zero(n, 0);
    const std::vector<double> mean = cluster_means(view, zero, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += kt.squared_distance(view.row(i), mean.data(), dim_);
    }
    return 2.0 * static_cast<double>(n) * total;
  }
  if (n <= config_.exact_pair_limit) {
    std::vector<double> partial(n, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          partial[i] +=
              std::sqrt(kt.squared_distance(view.row(i), view.row(j), dim_));
        }
      }
    }, 8);
    double total = 0.0;
    for (double p : partial) total += p;
    return 2.0 * total;
  }
  std::mt19937_64 rng(derive_seed(config_.rng_seed, node_id, 0x45));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  double total = 0.0;
  for (std::size_t s = 0; s < config_.sampled_pairs; ++s) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    total += std::sqrt(kt.squared_distance(view.row(i), view.row(j), dim_));
  }
  return total / static_cast<double>(config_.sampled_pairs) *
         static_cast<double>(n) * static_cast<double>(n - 1);
}

Template TreeBuilder::learn_node_template(
    int node_id, TeamScope team, const std::vector<std::uint32_t>& rows) {
  const TeamBatch batch = extract(rows, team);
  TemplateLearnConfig tc = config_.templates;
  tc.rng_seed = derive_seed(config_.rng_seed, static_cast<std::uint64_t>(node_id),
                            team == TeamScope::offense ? 1 : 2);
  BatchTemplateResult learned = learn_template(batch, team, tc);
  Template templ = std::move(learned.templ);

  const TreeNode& node = result_.tree.nodes[node_id];
  if (node.parent >= 0) {
    // Keep slot identities consistent with the parent's template.
    const TreeNode& parent = result_.tree.nodes[node.parent];
    const Template& pt =
        team == TeamScope::offense ? parent.offense : parent.defense;
    const int frames = std::max(pt.frames, templ.frames);
    const std::vector<double> a = expand_template(pt, frames);
    const std::vector<double> b = expand_template(templ, frames);
    CostMatrix cm(templ.slots);
    fill_cost_matrix(a, b, templ.slots, frames, config_.templates.cost_metric,
                     cm);
    const PermutationMap q = solve_assignment(cm).mapping;
    std::vector<double> reordered(templ.positions.size());
    const std::size_t len = static_cast<std::size_t>(templ.frames) * 2;
    for (int s = 0; s < templ.slots; ++s) {
      std::copy_n(templ.positions.begin() + q[s] * len, len,
                  reordered.begin() + s * len);
    }
    templ.positions = std::move(reordered);
  }

  // Align the node's plays to the final (parent-consistent) template.
  std::vector<PermutationMap> perms(rows.size());
  std::vector<double> costs(rows.size());
  align_batch(batch, templ, config_.templates.cost_metric, perms, costs);
  const AgentRange& r = split_.range(team);
  auto& comp = team == TeamScope::offense ? comp_offense_ : comp_defense_;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::span<double> row(aligned_.data() + rows[i] * dim_, dim_);
    permute_team_coords(row, stride_, r, perms[i]);
    comp[rows[i]] = compose(comp[rows[i]], perms[i]);
  }
  return templ;
}

void TreeBuilder::process(int node_id, std::vector<std::uint32_t> rows) {
  {
    TreeNode& node = result_.tree.nodes[node_id];
    node.play_count = rows.size();
    node.parent_aligned = node.parent >= 0;
  }
  Template off = learn_node_template(node_id, TeamScope::offense, rows);
  Template def = learn_node_template(node_id, TeamScope::defense, rows);
  {
    TreeNode& node = result_.tree.nodes[node_id];
    node.offense = std::move(off);
    node.defense = std::move(def);
    node.reconstruction_cost = node_cost(node_id, rows);
  }

  const int layer = result_.tree.nodes[node_id].layer;
  bool leaf = rows.size() <= config_.max_leaf_size ||
              layer + 1 >= config_.max_depth;
  std::optional<Partition> part;
  if (!leaf) {
    part = choose_partition(DataView::indexed(aligned_, dim_, rows),
                            config_.k_min, config_.k_max,
                            derive_seed(config_.rng_seed, node_id, 0x4b),
                            config_.templates.cost_metric,
                            config_.kmeans_max_iterations);
    leaf = !part.has_value();
  }

  if (leaf) {
    TreeNode& node = result_.tree.nodes[node_id];
    node.play_ids.reserve(rows.size());
    for (std::uint32_t r : rows) {
      node.play_ids.push_back(plays_[r].play_id);
      result_.placements[r] = {node_id, comp_offense_[r], comp_defense_[r]};
    }
    return;
  }

  std::vector<std::vector<std::uint32_t>> groups(part->k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    groups[part->labels[i]].push_back(rows[i]);
  }
  result_.tree.nodes[node_id].partition_score = part->score;
  for (int c = 0; c < part->k; ++c) {
    TreeNode child;
    child.id = static_cast<int>(result_.tree.nodes.size());
    child.layer = layer + 1;
    child.parent = node_id;
    result_.tree.nodes.push_back(std::move(child));
    const int child_id = result_.tree.nodes.back().id;
    ChildLink link;
    link.node = child_id;
    link.centroid.assign(part->centroids.begin() + c * dim_,
                         part->centroids.begin() + (c + 1) * dim_);
    result_.tree.nodes[node_id].children.push_back(std::move(link));
    queue_.emplace_back(child_id, std::move(groups[c]));
  }
}

TreeBuildResult TreeBuilder::run() {
  validate(config_);
  if (plays_.empty()) throw InvalidArgument("build_tree: empty corpus");
  const Play& first = plays_.front();
  split_ = first.team_split;
  if (split_.offense.count != split_.defense.count) {
    throw DimensionError("teams must have equal roster sizes");
  }
  frames_ = static_cast<int>(first.frame_count());
  stride_ = first.stride();
  dim_ = stride_ * frames_;
  aligned_.resize(plays_.size() * dim_);
  for (std::size_t i = 0; i < plays_.size(); ++i) {
    const Play& p = plays_[i];
    if (p.team_split != split_ || p.frame_count() != first.frame_count() ||
        p.coords.size() != dim_) {
      throw DimensionError("play " + p.play_id +
                           " does not match the corpus window/roster");
    }
    std::copy(p.coords.begin(), p.coords.end(), aligned_.begin() + i * dim_);
  }
  const int m = split_.offense.count;
  comp_offense_.assign(plays_.size(), PermutationMap::identity(m));
  comp_defense_.assign(plays_.size(), PermutationMap::identity(m));
  result_.placements.resize(plays_.size());

  AlignmentTree& tree = result_.tree;
  tree.config = config_;
  tree.window_seconds = first.window_seconds;
  tree.frames = frames_;
  tree.agents_per_team = m;
  tree.sample_rate = first.sample_rate;
  tree.nodes.emplace_back();

  std::vector<std::uint32_t> all(plays_.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = static_cast<std::uint32_t>(i);
  }
  queue_.emplace_back(0, std::move(all));
  while (!queue_.empty()) {
    auto [id, rows] = std::move(queue_.front());
    queue_.pop_front();
    process(id, std::move(rows));
  }

  const int depth = tree.depth();
  tree.layer_costs.assign(depth, 0.0);
  for (int l = 0; l < depth; ++l) {
    for (const TreeNode& n : tree.nodes) {
      if (n.layer == l || (n.is_leaf() && n.layer < l)) {
        tree.layer_costs[l] += n.reconstruction_cost;
      }
    }
  }
  return std::move(result_);
}

}  // namespace

TreeBuildResult build_tree(std::span<const Play> plays,
                           const TreeConfig& config) {
  return TreeBuilder(plays, config).run();
}

TreeAlignment align_with_tree(const Play& play, const AlignmentTree& tree) {
  if (tree.nodes.empty()) throw InvalidArgument("align_with_tree: empty tree");
  if (static_cast<int>(play.frame_count()) != tree.frames ||
      play.team_split.offense.count != tree.agents_per_team ||
      play.team_split.defense.count != tree.agents_per_team ||
      play.coords.size() != play.stride() * play.frame_count()) {
    throw DimensionError("play " + play.play_id + " has " +
                         std::to_string(play.frame_count()) +
                         " frames; the tree expects " +
                         std::to_string(tree.frames));
  }
  const CostMetric metric = tree.config.templates.cost_metric;
  TreeAlignment out;
  out.aligned = play;
  out.offense = PermutationMap::identity(tree.agents_per_team);
  out.defense = PermutationMap::identity(tree.agents_per_team);
  int id = 0;
  while (true) {
    const TreeNode& node = tree.nodes[id];
    out.path.push_back(id);
    double c_off = 0.0, c_def = 0.0;
    const PermutationMap p_off =
        align_team(out.aligned, node.offense, TeamScope::offense, metric, &c_off);
    const PermutationMap p_def =
        align_team(out.aligned, node.defense, TeamScope::defense, metric, &c_def);
    out.offense = compose(out.offense, p_off);
    out.defense = compose(out.defense, p_def);
    if (node.is_leaf()) {
      out.leaf = id;
      out.leaf_cost = c_off + c_def;
      break;
    }
    const kernels::KernelTable& kt = kernels::active();
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      const double d = kt.squared_distance(out.aligned.coords.data(),
                                           node.children[c].centroid.data(),
                                           out.aligned.coords.size());
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    id = node.children[best].node;
  }
  // Identities and actions follow their agents.
  auto permute_ids = [&](std::vector<int>& ids, const AgentRange& r,
                         const PermutationMap& p) {
    if (ids.empty()) return;
    std::vector<int> old(ids.begin() + r.begin, ids.begin() + r.begin + r.count);
    for (int s = 0; s < r.count; ++s) ids[r.begin + s] = old[p[s]];
  };
  for (TeamScope team : {TeamScope::offense, TeamScope::defense}) {
    const AgentRange& r = play.team_split.range(team);
    const PermutationMap& p =
        team == TeamScope::offense ? out.offense : out.defense;
    permute_ids(out.aligned.team_ids, r, p);
    permute_ids(out.aligned.player_ids, r, p);
    if (!out.aligned.actions.empty()) {
      const std::size_t row = play.agent_count() + 1;
      for (std::size_t f = 0; f < play.frame_count(); ++f) {
        int* a = out.aligned.actions.data() + f * row + r.begin;
        const int* src = play.actions.data() + f * row + r.begin;
        for (int s = 0; s < r.count; ++s) a[s] = src[p[s]];
      }
    }
  }
  return out;
}

}  // namespace playalign
