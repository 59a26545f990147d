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

#include "playalign/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "playalign/errors.hpp"
#include "playalign/ingest.hpp"
#include "playalign/kernels.hpp"
#include "playalign/util.hpp"

namespace playalign {

double within_cluster_error(const DataView& data, std::span<const int> labels,
                            int k) {
  if (data.count == 0) return 0.0;
  if (labels.size() != data.count) {
    throw DimensionError("within_cluster_error: one label per row required");
  }
  const std::vector<double> means = cluster_means(data, labels, k);
  const kernels::KernelTable& kt = kernels::active();
  double total = 0.0;
  for (std::size_t i = 0; i < data.count; ++i) {
    total += std::sqrt(kt.squared_distance(
        data.row(i), means.data() + labels[i] * data.dim, data.dim));
  }
  return total / static_cast<double>(data.count);
}

std::vector<double> variance_explained(const DataView& data) {
  const std::size_t n = data.count;
  const std::size_t d = data.dim;
  if (n < 2 || d == 0) return {};
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) x(i, j) = row[j];
  }
  x.rowwise() -= x.colwise().mean();
  // The non-zero spectrum of X'X equals that of XX'; use the smaller one.
  const Eigen::MatrixXd cov = n <= d ? Eigen::MatrixXd(x * x.transpose())
                                     : Eigen::MatrixXd(x.transpose() * x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      cov, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("variance_explained: eigen decomposition failed");
  }
  std::vector<double> values(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + cov.rows());
  std::sort(values.begin(), values.end(), std::greater<>());
  const double top = values.empty() ? 0.0 : values.front();
  if (!(top > 0.0)) return {};
  double total = 0.0;
  for (double& v : values) {
    if (v <= top * 1e-12) v = 0.0;
    total += v;
  }
  for (double& v : values) v /= total;
  return values;
}

void Judgments::set(const std::string& query_id, const std::string& play_id,
                    bool relevant) {
  by_query_[query_id][play_id] = relevant;
}

bool Judgments::relevant(const std::string& query_id,
                         const std::string& play_id) const {
  const auto q = by_query_.find(query_id);
  if (q == by_query_.end()) return false;
  const auto p = q->second.find(play_id);
  return p != q->second.end() && p->second;
}

std::set<std::string> Judgments::relevant_set(
    const std::string& query_id) const {
  std::set<std::string> out;
  const auto q = by_query_.find(query_id);
  if (q == by_query_.end()) return out;
  for (const auto& [id, rel] : q->second) {
    if (rel) out.insert(id);
  }
  return out;
}

std::vector<std::string> Judgments::queries() const {
  std::vector<std::string> out;
  for (const auto& [q, items] : by_query_) out.push_back(q);
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Judgments Judgments::read(std::istream& in) {
  Judgments j;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (n == 1 && line.rfind("query_id", 0) == 0) continue;
    const auto f = split_csv(line);
    if (f.size() != 3) throw ParseError("expected query_id,play_id,relevant", n);
    if (f[2] != "0" && f[2] != "1") {
      throw ParseError("relevant must be 0 or 1, got '" + f[2] + "'", n);
    }
    j.set(f[0], f[1], f[2] == "1");
  }
  return j;
}

Judgments Judgments::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open judgments " + path.string());
  return read(in);
}

void Judgments::write(std::ostream& out) const {
  out << "query_id,play_id,relevant\n";
  for (const auto& [q, items] : by_query_) {
    for (const auto& [p, rel] : items) {
      out << q << ',' << p << ',' << (rel ? 1 : 0) << '\n';
    }
  }
}

double average_precision(std::span<const std::string> ranking,
                         const std::set<std::string>& relevant) {
  double sum = 0.0;
  int hits = 0;
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (relevant.contains(ranking[r])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return hits == 0 ? 0.0 : sum / hits;
}

double expected_reciprocal_rank(std::span<const std::string> ranking,
                                const std::set<std::string>& relevant) {
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (relevant.contains(ranking[r])) return 1.0 / static_cast<double>(r + 1);
  }
  return 0.0;
}

std::map<std::string, std::map<std::string, std::vector<std::string>>>
read_rankings(std::istream& in) {
  std::map<std::string, std::map<std::string, std::vector<std::pair<int, std::string>>>>
      rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (n == 1 && line.rfind("query_id", 0) == 0) continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw ParseError("expected query_id,method,rank,play_id", n);
    int rank = 0;
    try {
      rank = std::stoi(f[2]);
    } catch (const std::exception&) {
      throw ParseError("malformed rank '" + f[2] + "'", n);
    }
    rows[f[0]][f[1]].emplace_back(rank, f[3]);
  }
  std::map<std::string, std::map<std::string, std::vector<std::string>>> out;
  for (auto& [q, methods] : rows) {
    for (auto& [m, items] : methods) {
      std::stable_sort(items.begin(), items.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [rank, id] : items) out[q][m].push_back(std::move(id));
    }
  }
  return out;
}

void write_rankings(std::ostream& out, std::span<const RankingRow> rows) {
  out << "query_id,method,rank,play_id\n";
  for (const RankingRow& r : rows) {
    out << r.query_id << ',' << r.method << ',' << r.rank << ',' << r.play_id
        << '\n';
  }
}

std::vector<InterleavedItem> team_draft_interleave(
    std::span<const std::string> a, std::span<const std::string> b,
    const std::function<bool()>& coin) {
  std::vector<InterleavedItem> out;
  std::set<std::string> seen;
  std::size_t ia = 0, ib = 0;
  auto skip = [&](std::span<const std::string> list, std::size_t& i) {
    while (i < list.size() && seen.contains(list[i])) ++i;
    return i < list.size();
  };
  while (true) {
    if (!skip(a, ia) || !skip(b, ib)) break;
    if (a[ia] == b[ib]) {
      seen.insert(a[ia]);
      out.push_back({a[ia], Team::both});
      continue;
    }
    const bool a_first = coin();
    std::span<const std::string> first = a_first ? a : b;
    std::span<const std::string> second = a_first ? b : a;
    std::size_t& i1 = a_first ? ia : ib;
    std::size_t& i2 = a_first ? ib : ia;
    seen.insert(first[i1]);
    out.push_back({first[i1], a_first ? Team::a : Team::b});
    if (!skip(second, i2)) break;
    seen.insert(second[i2]);
    out.push_back({second[i2], a_first ? Team::b : Team::a});
  }
  return out;
}

std::vector<InterleavedItem> team_draft_interleave(
    std::span<const std::string> a, std::span<const std::string> b,
    std::uint64_t seed) {
  Rng rng(seed);
  return team_draft_interleave(a, b, [&rng] { return rng.uniform() < 0.5; });
}

InterleaveOutcome interleave_outcome(std::span<const InterleavedItem> items,
                                     const std::set<std::string>& relevant) {
  InterleaveOutcome o;
  for (const InterleavedItem& it : items) {
    if (!relevant.contains(it.play_id)) continue;
    switch (it.credit) {
      case Team::a: ++o.a_wins; break;
      case Team::b: ++o.b_wins; break;
      case Team::both: ++o.shared; break;
    }
  }
  return o;
}

const AlignmentCurves& CompressibilityReport::at(
    const std::string& alignment) const {
  for (const AlignmentCurves& c : alignments) {
    if (c.alignment == alignment) return c;
  }
  throw NotFound("no curves for alignment " + alignment);
}

void CompressibilityReport::write_wce_csv(std::ostream& out) const {
  out << "alignment,k,wce\n";
  for (const AlignmentCurves& c : alignments) {
    for (const auto& [k, v] : c.wce) {
      out << c.alignment << ',' << k << ',' << format_double(v) << '\n';
    }
  }
}

void CompressibilityReport::write_variance_csv(std::ostream& out) const {
  out << "alignment,component,ratio\n";
  for (const AlignmentCurves& c : alignments) {
    for (std::size_t i = 0; i < c.variance.size(); ++i) {
      out << c.alignment << ',' << i + 1 << ',' << format_double(c.variance[i])
          << '\n';
    }
  }
}

CompressibilityReport compressibility_report(
    std::span<const Play> plays, const AlignmentTree& tree,
    const CompressibilityConfig& config) {
  if (plays.empty()) throw InvalidArgument("compressibility: no plays");
  const std::size_t dim = plays.front().coords.size();
  const std::size_t n = plays.size();
  const CostMetric metric = tree.config.templates.cost_metric;
  for (const Play& p : plays) {
    if (p.coords.size() != dim) {
      throw DimensionError("compressibility: plays differ in length");
    }
  }
  std::vector<double> identity(n * dim), role(n * dim), aligned(n * dim);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Play& p = plays[i];
      std::copy(p.coords.begin(), p.coords.end(), identity.begin() + i * dim);
      Play r = p;
      align_team(r, tree.root().offense, TeamScope::offense, metric);
      align_team(r, tree.root().defense, TeamScope::defense, metric);
      std::copy(r.coords.begin(), r.coords.end(), role.begin() + i * dim);
      const TreeAlignment ta = align_with_tree(p, tree);
      std::copy(ta.aligned.coords.begin(), ta.aligned.coords.end(),
                aligned.begin() + i * dim);
    }
  });

  CompressibilityReport report;
  const std::pair<const char*, const std::vector<double>*> sets[] = {
      {"identity", &identity}, {"role", &role}, {"tree", &aligned}};
  for (const auto& [name, values] : sets) {
    AlignmentCurves c;
    c.alignment = name;
    const DataView view = DataView::dense(*values, dim);
    for (int k : config.k_values) {
      const auto km = kmeans_best_of(
          view, {k, config.kmeans_max_iterations, derive_seed(config.seed, k)},
          config.restarts);
      if (!km) continue;
      c.wce.emplace_back(k, within_cluster_error(view, km->labels, km->k));
    }
    std::vector<double> v = variance_explained(view);
    if (v.size() > static_cast<std::size_t>(config.components)) {
      v.resize(config.components);
    }
    c.variance = std::move(v);
    for (double x : c.variance) c.cumulative_variance += x;
    report.alignments.push_back(std::move(c));
  }
  return report;
}

}  // namespace playalign
