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

#include "playalign/index_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "playalign/errors.hpp"

namespace playalign {

namespace {

constexpr char kMagic[8] = {'P', 'L', 'A', 'Y', 'I', 'D', 'X', '\n'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void uint(T v) {
    auto u = static_cast<std::uint64_t>(v);
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf[i] = static_cast<char>(u & 0xff);
      u >>= 8;
    }
    out_.write(buf, sizeof(T));
  }
  void u8(std::uint8_t v) { uint(v); }
  void u32(std::uint32_t v) { uint(v); }
  void i32(std::int32_t v) { uint(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) { uint(v); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    for (double d : v) f64(d);
  }
  void perm(const PermutationMap& p) {
    u8(static_cast<std::uint8_t>(p.size()));
    for (int v : p.mapping()) u8(static_cast<std::uint8_t>(v));
  }
  void templ(const Template& t) {
    u8(t.team == TeamScope::offense ? 0 : 1);
    i32(t.slots);
    i32(t.frames);
    doubles(t.positions);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T uint() {
    unsigned char buf[sizeof(T)];
    in_.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in_) throw ParseError("index file is truncated", 0);
    std::uint64_t u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) u = (u << 8) | buf[i];
    return static_cast<T>(u);
  }
  std::uint8_t u8() { return uint<std::uint8_t>(); }
  std::uint32_t u32() { return uint<std::uint32_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() { return uint<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t count(std::size_t limit = std::size_t{1} << 40) {
    const std::uint64_t n = u64();
    if (n > limit) throw ParseError("index file is corrupt (bad length)", 0);
    return static_cast<std::size_t>(n);
  }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw ParseError("index file is corrupt (bad string)", 0);
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (!in_) throw ParseError("index file is truncated", 0);
    return s;
  }
  std::vector<double> doubles() {
    const std::size_t n = count(std::size_t{1} << 32);
    std::vector<double> v;
    v.reserve(std::min<std::size_t>(n, 1 << 20));
    for (std::size_t i = 0; i < n; ++i) v.push_back(f64());
    return v;
  }
  PermutationMap perm() {
    const int n = u8();
    std::vector<int> v(n);
    for (int& x : v) x = u8();
    if (!is_bijection(v)) throw ParseError("index file has a bad permutation", 0);
    return PermutationMap(std::move(v));
  }
  Template templ() {
    Template t;
    t.team = u8() == 0 ? TeamScope::offense : TeamScope::defense;
    t.slots = i32();
    t.frames = i32();
    t.positions = doubles();
    if (t.positions.size() != static_cast<std::size_t>(t.slots) * t.frames * 2) {
      throw ParseError("index file has a malformed template", 0);
    }
    return t;
  }

 private:
  std::istream& in_;
};

void write_entries(Writer& w, const std::vector<HashEntry>& entries) {
  w.u64(entries.size());
  for (const HashEntry& e : entries) {
    w.str(e.play_id);
    w.perm(e.offense);
    w.perm(e.defense);
  }
}

std::vector<HashEntry> read_entries(Reader& r) {
  const std::size_t n = r.count();
  std::vector<HashEntry> out;
  out.reserve(std::min<std::size_t>(n, 1 << 20));
  for (std::size_t i = 0; i < n; ++i) {
    HashEntry e;
    e.play_id = r.str();
    e.offense = r.perm();
    e.defense = r.perm();
    out.push_back(std::move(e));
  }
  return out;
}

void write_tree(Writer& w, const AlignmentTree& t) {
  const TreeConfig& c = t.config;
  w.u64(c.max_leaf_size);
  w.i32(c.max_depth);
  w.i32(c.k_min);
  w.i32(c.k_max);
  w.u64(c.rng_seed);
  w.i32(c.templates.max_iterations);
  w.f64(c.templates.convergence_threshold);
  w.u64(c.templates.rng_seed);
  w.u8(c.templates.cost_metric == CostMetric::squared ? 1 : 0);
  w.u8(c.templates.granularity == TemplateGranularity::mean_position ? 1 : 0);
  w.i32(c.kmeans_max_iterations);
  w.u64(c.exact_pair_limit);
  w.u64(c.sampled_pairs);

  w.i32(t.window_seconds);
  w.i32(t.frames);
  w.i32(t.agents_per_team);
  w.f64(t.sample_rate);
  w.u64(t.nodes.size());
  for (const TreeNode& n : t.nodes) {
    w.i32(n.id);
    w.i32(n.layer);
    w.i32(n.parent);
    w.u8(n.parent_aligned ? 1 : 0);
    w.u64(n.play_count);
    w.f64(n.partition_score);
    w.f64(n.reconstruction_cost);
    w.templ(n.offense);
    w.templ(n.defense);
    w.u64(n.children.size());
    for (const ChildLink& c2 : n.children) {
      w.i32(c2.node);
      w.doubles(c2.centroid);
    }
    w.u64(n.play_ids.size());
    for (const std::string& id : n.play_ids) w.str(id);
  }
  w.doubles(t.layer_costs);
}

AlignmentTree read_tree(Reader& r) {
  AlignmentTree t;
  TreeConfig& c = t.config;
  c.max_leaf_size = r.u64();
  c.max_depth = r.i32();
  c.k_min = r.i32();
  c.k_max = r.i32();
  c.rng_seed = r.u64();
  c.templates.max_iterations = r.i32();
  c.templates.convergence_threshold = r.f64();
  c.templates.rng_seed = r.u64();
  c.templates.cost_metric =
      r.u8() == 1 ? CostMetric::squared : CostMetric::euclidean;
  c.templates.granularity = r.u8() == 1 ? TemplateGranularity::mean_position
                                        : TemplateGranularity::trajectory;
  c.kmeans_max_iterations = r.i32();
  c.exact_pair_limit = r.u64();
  c.sampled_pairs = r.u64();

  t.window_seconds = r.i32();
  t.frames = r.i32();
  t.agents_per_team = r.i32();
  t.sample_rate = r.f64();
  const std::size_t nodes = r.count(std::size_t{1} << 24);
  for (std::size_t i = 0; i < nodes; ++i) {
    TreeNode n;
    n.id = r.i32();
    n.layer = r.i32();
    n.parent = r.i32();
    n.parent_aligned = r.u8() != 0;
    n.play_count = r.u64();
    n.partition_score = r.f64();
    n.reconstruction_cost = r.f64();
    n.offense = r.templ();
    n.defense = r.templ();
    const std::size_t children = r.count(1 << 16);
    for (std::size_t k = 0; k < children; ++k) {
      ChildLink link;
      link.node = r.i32();
      link.centroid = r.doubles();
      n.children.push_back(std::move(link));
    }
    const std::size_t ids = r.count();
    for (std::size_t k = 0; k < ids; ++k) n.play_ids.push_back(r.str());
    if (n.id != static_cast<int>(i)) {
      throw ParseError("index file has out-of-order tree nodes", 0);
    }
    t.nodes.push_back(std::move(n));
  }
  for (const TreeNode& n : t.nodes) {
    for (const ChildLink& c2 : n.children) {
      if (c2.node <= n.id || c2.node >= static_cast<int>(t.nodes.size())) {
        throw ParseError("index file has a bad child link", 0);
      }
    }
  }
  t.layer_costs = r.doubles();
  return t;
}

}  // namespace

void write_index(std::ostream& out, const PlayIndex& index) {
  out.write(kMagic, sizeof(kMagic));
  Writer w(out);
  w.u32(kIndexFormatVersion);
  w.u64(index.windows().size());
  for (const auto& [seconds, win] : index.windows()) {
    w.i32(seconds);
    write_tree(w, win.tree);
    w.u64(win.buckets.size());
    for (const auto& [leaf, entries] : win.buckets) {
      w.i32(leaf);
      write_entries(w, entries);
    }
    w.u8(win.baseline ? 1 : 0);
    if (win.baseline) {
      const BaselineIndex& b = *win.baseline;
      w.i32(b.clusters);
      w.u64(b.dim);
      w.doubles(b.centroids);
      w.templ(b.offense);
      w.templ(b.defense);
      w.u64(b.buckets.size());
      for (const auto& bucket : b.buckets) write_entries(w, bucket);
    }
  }
}

PlayIndex read_index(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a playalign index file", 0);
  }
  Reader r(in);
  const std::uint32_t version = r.u32();
  if (version != kIndexFormatVersion) {
    throw ParseError("unsupported index format version " +
                         std::to_string(version),
                     0);
  }
  PlayIndex index;
  const std::size_t windows = r.count(64);
  for (std::size_t i = 0; i < windows; ++i) {
    WindowIndex win;
    win.window_seconds = r.i32();
    win.tree = read_tree(r);
    const std::size_t buckets = r.count();
    for (std::size_t b = 0; b < buckets; ++b) {
      const int leaf = r.i32();
      win.buckets.emplace(leaf, read_entries(r));
    }
    if (r.u8() != 0) {
      BaselineIndex b;
      b.clusters = r.i32();
      b.dim = r.u64();
      b.centroids = r.doubles();
      b.offense = r.templ();
      b.defense = r.templ();
      const std::size_t n = r.count(1 << 24);
      for (std::size_t k = 0; k < n; ++k) b.buckets.push_back(read_entries(r));
      if (static_cast<int>(b.buckets.size()) != b.clusters ||
          b.centroids.size() != b.dim * b.clusters) {
        throw ParseError("index file has a malformed baseline", 0);
      }
      win.baseline = std::move(b);
    }
    index.add_window(std::move(win));
  }
  return index;
}

void save_index(const std::filesystem::path& path, const PlayIndex& index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write index " + path.string());
  write_index(out, index);
  if (!out) throw Error("failed writing index " + path.string());
}

PlayIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open index " + path.string());
  return read_index(in);
}

}  // namespace playalign
