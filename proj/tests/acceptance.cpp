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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "playalign/assignment.hpp"
#include "playalign/index_io.hpp"
#include "playalign/metrics.hpp"
#include "playalign/play_store.hpp"
#include "playalign/retrieval.hpp"
#include "playalign/synthetic.hpp"
#include "playalign/template.hpp"
#include "playalign/tree.hpp"
#include "playalign/util.hpp"

namespace pa = playalign;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const Outcome& o) {
  std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <typename Fn>
void criterion(const std::string& name, Fn&& fn) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), " [%.1f s]", seconds_since(start));
  o.detail += buf;
  report(name, o);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

// Minimum assignment cost by enumerating every permutation, summed in row
// order like the solver's reported cost.
double brute_force_min(const pa::CostMatrix& c) {
  std::vector<int> p(c.size());
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int r = 0; r < c.size(); ++r) s += c(r, p[r]);
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

Outcome assignment_oracle() {
  pa::Rng rng(20240611);
  std::vector<pa::CostMatrix> mats;
  for (int i = 0; i < 1000; ++i) {
    pa::CostMatrix c(5);
    for (int r = 0; r < 5; ++r) {
      for (int k = 0; k < 5; ++k) c(r, k) = rng.uniform(0.0, 100.0);
    }
    mats.push_back(std::move(c));
  }
  int mismatches = 0;
  const auto start = Clock::now();
  std::vector<double> solved;
  solved.reserve(mats.size());
  for (const auto& c : mats) solved.push_back(pa::solve_assignment(c).total_cost);
  const double solve_time = seconds_since(start);
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (solved[i] != brute_force_min(mats[i])) ++mismatches;
  }
  return {mismatches == 0 && solve_time < 1.0,
          std::to_string(mismatches) + " mismatches over 1000 matrices, solve " +
              fmt("%.4f s", solve_time)};
}

Outcome em_monotonicity() {
  pa::SyntheticConfig cfg;
  cfg.formations = 2;
  cfg.plays_per_formation = 250;
  cfg.noise = 1.0;
  cfg.seed = 11;
  const auto corpus = pa::generate_synthetic(cfg);
  pa::TemplateLearnConfig tc(5);
  tc.cost_metric = pa::CostMetric::squared;
  int violations = 0;
  std::size_t steps = 0;
  for (pa::TeamScope team : {pa::TeamScope::offense, pa::TeamScope::defense}) {
    const auto r = pa::learn_template(corpus.plays, team, tc);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
      ++steps;
      if (r.objective_trace[i] > r.objective_trace[i - 1]) ++violations;
    }
  }
  return {violations == 0 && steps > 0,
          std::to_string(steps) + " iterations checked over 500 plays, " +
              std::to_string(violations) + " increases"};
}

Outcome tree_refinement() {
  pa::SyntheticConfig cfg;
  cfg.formations = 8;
  cfg.plays_per_formation = 200;
  cfg.noise = 1.0;
  cfg.seed = 21;
  const auto corpus = pa::generate_synthetic(cfg);
  pa::TreeConfig tc(7);
  tc.max_leaf_size = 50;
  const pa::AlignmentTree tree = pa::grow_tree(corpus.plays, tc);
  const auto& c = tree.layer_costs;
  std::string detail = "layer costs:";
  for (double v : c) detail += fmt(" %.4g", v);
  bool ok = c.size() >= 4;
  for (std::size_t l = 0; ok && l < 3; ++l) ok = c[l + 1] < c[l];
  return {ok, detail};
}

double leaf_purity(const pa::TreeBuildResult& built,
                   const std::vector<pa::SyntheticLabel>& labels) {
  std::map<int, std::map<int, int>> counts;
  for (std::size_t i = 0; i < built.placements.size(); ++i) {
    ++counts[built.placements[i].leaf][labels[i].formation];
  }
  int majority = 0;
  for (const auto& [leaf, by_label] : counts) {
    int best = 0;
    for (const auto& [label, n] : by_label) best = std::max(best, n);
    majority += best;
  }
  return static_cast<double>(majority) / labels.size();
}

Outcome formation_recovery() {
  pa::SyntheticConfig cfg;
  cfg.formations = 4;
  cfg.plays_per_formation = 500;
  cfg.noise = 1.0;
  cfg.seed = 31;
  const auto corpus = pa::generate_synthetic(cfg);
  pa::TreeConfig tc(3);
  tc.max_leaf_size = 600;
  const pa::TreeBuildResult built = pa::build_tree(corpus.plays, tc);
  const int root_k = static_cast<int>(built.tree.root().children.size());
  const double purity = leaf_purity(built, corpus.labels);
  return {root_k == 4 && purity >= 0.9,
          "root K = " + std::to_string(root_k) + ", leaves " +
              std::to_string(built.tree.leaf_count()) + ", purity " +
              fmt("%.4f", purity)};
}

Outcome compressibility() {
  pa::SyntheticConfig cfg;
  cfg.formations = 6;
  cfg.plays_per_formation = 150;
  cfg.noise = 1.0;
  cfg.seed = 41;
  const auto corpus = pa::generate_synthetic(cfg);
  pa::TreeConfig tc(9);
  tc.max_leaf_size = 100;
  const pa::AlignmentTree tree = pa::grow_tree(corpus.plays, tc);
  pa::CompressibilityConfig cc;
  cc.seed = 4;
  const auto rep = pa::compressibility_report(corpus.plays, tree, cc);
  const auto& id = rep.at("identity");
  const auto& role = rep.at("role");
  const auto& tr = rep.at("tree");
  bool ok = id.wce.size() == 3 && role.wce.size() == 3 && tr.wce.size() == 3;
  std::string detail;
  for (std::size_t i = 0; ok && i < 3; ++i) {
    ok = tr.wce[i].second < role.wce[i].second &&
         role.wce[i].second < id.wce[i].second;
    detail += "K=" + std::to_string(tr.wce[i].first) +
              fmt(" wce tree %.3f", tr.wce[i].second) +
              fmt(" role %.3f", role.wce[i].second) +
              fmt(" identity %.3f; ", id.wce[i].second);
  }
  ok = ok && tr.cumulative_variance > role.cumulative_variance &&
       role.cumulative_variance > id.cumulative_variance;
  detail += fmt("var@10 tree %.4f", tr.cumulative_variance) +
            fmt(" role %.4f", role.cumulative_variance) +
            fmt(" identity %.4f", id.cumulative_variance);
  return {ok, detail};
}

pa::Play scramble(const pa::Play& p, pa::Rng& rng) {
  const int m = p.agents_per_team();
  std::vector<int> a(m), b(m);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  do {
    rng.shuffle(a);
    rng.shuffle(b);
  } while (pa::PermutationMap(a).is_identity() && pa::PermutationMap(b).is_identity());
  pa::Play q = pa::apply_permutation(p, pa::PermutationMap(a), pa::TeamScope::offense);
  return pa::apply_permutation(q, pa::PermutationMap(b), pa::TeamScope::defense);
}

Outcome retrieval_fidelity() {
  pa::SyntheticConfig cfg;
  cfg.formations = 8;
  cfg.plays_per_formation = 250;
  cfg.noise = 1.0;
  cfg.seed = 51;
  auto store = std::make_shared<pa::PlayStore>();
  store->add_all(pa::generate_synthetic(cfg).plays);
  pa::IndexConfig ic(13);
  ic.tree.max_leaf_size = 200;
  const pa::PlayIndex index = pa::build_index(store, ic);
  pa::Rng rng(99);
  int self_ok = 0, scrambled_ok = 0;
  for (int i = 0; i < 100; ++i) {
    const pa::Play& p = store->plays()[rng.index(store->size())];
    pa::Query q;
    q.play = p;
    q.selected = pa::AgentSubset::all(5);
    q.k = 5;
    auto r = pa::run_query(index, q).results;
    if (!r.empty() && r[0].play_id == p.play_id && r[0].distance == 0.0) ++self_ok;
    q.play = scramble(p, rng);
    r = pa::run_query(index, q).results;
    if (!r.empty() && r[0].play_id == p.play_id && r[0].distance == 0.0) {
      ++scrambled_ok;
    }
  }

  // Latency on a 100,000-play index of 1 s windows.
  pa::SyntheticConfig big;
  big.formations = 20;
  big.plays_per_formation = 5000;
  big.window_seconds = 1;
  big.noise = 1.0;
  big.plays_per_game = 1000;
  big.seed = 52;
  auto big_store = std::make_shared<pa::PlayStore>();
  big_store->add_all(pa::generate_synthetic(big).plays);
  pa::IndexConfig bc(17);
  bc.with_baseline = false;
  const auto build_start = Clock::now();
  const pa::PlayIndex big_index = pa::build_index(big_store, bc);
  const double build_time = seconds_since(build_start);
  std::vector<double> times;
  for (int i = 0; i < 50; ++i) {
    pa::Query q;
    q.play = scramble(big_store->plays()[rng.index(big_store->size())], rng);
    q.selected = pa::AgentSubset::all(5);
    q.k = 10;
    const auto t = Clock::now();
    const auto r = pa::run_query(big_index, q);
    times.push_back(seconds_since(t));
  }
  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  const auto stats = pa::index_stats(big_index).front();
  return {self_ok == 100 && scrambled_ok == 100 && median < 1.0,
          "self " + std::to_string(self_ok) + "/100, scrambled " +
              std::to_string(scrambled_ok) + "/100, median latency " +
              fmt("%.4f s", median) + " on " + std::to_string(stats.plays) +
              " plays (" + std::to_string(stats.leaves) + " leaves, build " +
              fmt("%.0f s)", build_time)};
}

Outcome subset_advantage() {
  pa::SyntheticConfig cfg;
  cfg.formations = 8;
  cfg.plays_per_formation = 60;
  cfg.duplicates_per_play = 4;
  cfg.duplicate_motion = 3.0;
  cfg.duplicate_noise = 0.5;
  cfg.noise = 0.5;
  cfg.seed = 61;
  const auto corpus = pa::generate_synthetic(cfg);
  std::map<std::string, std::set<std::string>> groups;
  for (const auto& l : corpus.labels) groups[l.source_play].insert(l.play_id);
  auto store = std::make_shared<pa::PlayStore>();
  store->add_all(corpus.plays);
  pa::IndexConfig ic(19);
  ic.tree.max_leaf_size = 200;
  const pa::PlayIndex index = pa::build_index(store, ic);

  pa::Rng rng(7);
  std::vector<std::string> sources;
  for (const auto& [s, members] : groups) sources.push_back(s);
  rng.shuffle(sources);
  double ap_tree = 0.0, ap_base = 0.0;
  const int queries = 20;
  for (int i = 0; i < queries; ++i) {
    const pa::Play& p = store->at(sources[i]);
    std::set<std::string> relevant = groups[sources[i]];
    relevant.erase(p.play_id);
    pa::Query q;
    q.play = p;
    // Two players and the ball.
    const int a = static_cast<int>(rng.index(5));
    const int b = static_cast<int>(rng.index(5));
    q.selected.offense = 1u << a;
    q.selected.defense = 1u << b;
    q.selected.ball = true;
    q.k = 11;
    for (pa::Method m : {pa::Method::tree, pa::Method::baseline}) {
      q.method = m;
      std::vector<std::string> ranking;
      for (const auto& r : pa::run_query(index, q).results) {
        if (r.play_id != p.play_id && ranking.size() < 10) {
          ranking.push_back(r.play_id);
        }
      }
      (m == pa::Method::tree ? ap_tree : ap_base) +=
          pa::average_precision(ranking, relevant);
    }
  }
  ap_tree /= queries;
  ap_base /= queries;
  return {ap_tree > ap_base,
          fmt("mean AP tree %.4f", ap_tree) + fmt(" vs baseline %.4f", ap_base) +
              " over " + std::to_string(queries) + " queries"};
}

Outcome metric_units() {
  const std::vector<std::string> r3{"a", "b", "c"};
  const double ap = pa::average_precision(r3, {"a", "c"});
  const std::vector<std::string> r4{"a", "b", "c", "d"};
  const double err = pa::expected_reciprocal_rank(r4, {"d"});
  pa::Rng rng(1234);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::string> pool;
    for (int i = 0; i < 20; ++i) pool.push_back("p" + std::to_string(i));
    rng.shuffle(pool);
    std::vector<std::string> a(pool.begin(), pool.begin() + 1 + rng.index(10));
    rng.shuffle(pool);
    std::vector<std::string> b(pool.begin(), pool.begin() + 1 + rng.index(10));
    const auto items = pa::team_draft_interleave(a, b, rng.next());
    int na = 0, nb = 0;
    std::set<std::string> seen;
    for (const auto& it : items) {
      if (!seen.insert(it.play_id).second) ++violations;
      if (it.credit == pa::Team::a) ++na;
      if (it.credit == pa::Team::b) ++nb;
      if (std::abs(na - nb) > 1) ++violations;
    }
  }
  const bool ok = std::abs(ap - 0.8333333333333334) <= 1e-9 &&
                  std::abs(ap - 0.8333) <= 1e-4 && err == 0.25 &&
                  violations == 0;
  return {ok, fmt("AP %.10f", ap) + fmt(", ERR %.17g", err) +
                  ", interleave violations " + std::to_string(violations) +
                  " over 1000 pairs"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  // Two CLI builds from the same store and seed.
  const fs::path dir = fs::temp_directory_path() / "playalign_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) {
    if (pa::cli::run(args, out, err) != 0) {
      throw std::runtime_error("cli failed: " + err.str());
    }
  };
  run({"generate", "--out", (dir / "corpus").string(), "--formations", "4",
       "--plays-per-formation", "250", "--noise", "1", "--seed", "5"});
  run({"ingest", "--manifest", (dir / "corpus" / "manifest.txt").string(),
       "--out", (dir / "store.txt").string(), "--window-seconds", "4"});
  for (const char* name : {"a.idx", "b.idx"}) {
    run({"build", "--store", (dir / "store.txt").string(), "--out",
         (dir / name).string(), "--seed", "42", "--max-leaf-size", "200"});
  }
  const std::string a = slurp(dir / "a.idx");
  const bool cli_same = !a.empty() && a == slurp(dir / "b.idx");

  // Default configuration on 10,000 plays of 4 s.
  pa::SyntheticConfig cfg;
  cfg.formations = 10;
  cfg.plays_per_formation = 1000;
  cfg.noise = 1.0;
  cfg.seed = 71;
  auto store = std::make_shared<pa::PlayStore>();
  store->add_all(pa::generate_synthetic(cfg).plays);
  pa::IndexConfig ic(42);
  ic.with_baseline = false;
  std::string bytes[2];
  std::size_t largest = 0, leaves = 0;
  for (std::string& b : bytes) {
    const pa::PlayIndex index = pa::build_index(store, ic);
    std::ostringstream os;
    pa::write_index(os, index);
    b = os.str();
    const auto s = pa::index_stats(index).front();
    largest = s.largest_leaf;
    leaves = s.leaves;
  }
  fs::remove_all(dir);
  const bool big_same = bytes[0] == bytes[1];
  return {cli_same && big_same && largest <= 2000,
          std::string("cli builds ") + (cli_same ? "identical" : "differ") +
              ", 10k-play builds " + (big_same ? "identical" : "differ") +
              ", " + std::to_string(leaves) + " leaves, largest " +
              std::to_string(largest)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only(argv + 1, argv + argc);
  auto want = [&](const char* name) { return only.empty() || only.contains(name); };
  if (want("assignment")) criterion("assignment_oracle", assignment_oracle);
  if (want("em")) criterion("em_monotonicity", em_monotonicity);
  if (want("refinement")) criterion("tree_refinement", tree_refinement);
  if (want("formations")) criterion("formation_recovery", formation_recovery);
  if (want("compressibility")) criterion("compressibility_ordering", compressibility);
  if (want("retrieval")) criterion("retrieval_fidelity", retrieval_fidelity);
  if (want("subset")) criterion("subset_advantage", subset_advantage);
  if (want("metrics")) criterion("metric_units", metric_units);
  if (want("determinism")) criterion("determinism", determinism);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILED",
              failures);
  return failures == 0 ? 0 : 1;
}
