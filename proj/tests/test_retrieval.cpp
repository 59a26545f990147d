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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "playalign/errors.hpp"
#include "playalign/index_io.hpp"
#include "playalign/retrieval.hpp"
#include "playalign/synthetic.hpp"
#include "test_support.hpp"

namespace pa = playalign;

namespace {

struct Fixture {
  std::shared_ptr<pa::PlayStore> store = std::make_shared<pa::PlayStore>();
  pa::PlayIndex index;

  explicit Fixture(int formations = 3, int per = 40, std::size_t leaf = 50) {
    pa::SyntheticConfig cfg;
    cfg.formations = formations;
    cfg.plays_per_formation = per;
    cfg.seed = 17;
    store->add_all(pa::generate_synthetic(cfg).plays);
    pa::IndexConfig ic(3);
    ic.tree.max_leaf_size = leaf;
    index = pa::build_index(store, ic);
  }
};

const Fixture& shared() {
  static const Fixture f;
  return f;
}

pa::Query query_for(const pa::Play& p, pa::AgentSubset sel = pa::AgentSubset::all(5)) {
  pa::Query q;
  q.play = p;
  q.selected = sel;
  q.k = 10;
  return q;
}

std::vector<std::string> ids(const pa::QueryResult& r) {
  std::vector<std::string> out;
  for (const auto& x : r.results) out.push_back(x.play_id);
  return out;
}

}  // namespace

TEST_SUITE("retrieval") {
  TEST_CASE("self query ranks first at distance zero") {
    const auto& f = shared();
    for (std::size_t i = 0; i < f.store->size(); i += 11) {
      const pa::Play& p = f.store->plays()[i];
      for (auto m : {pa::Method::tree, pa::Method::baseline}) {
        auto q = query_for(p);
        q.method = m;
        const auto r = pa::run_query(f.index, q);
        REQUIRE_FALSE(r.results.empty());
        CHECK(r.results[0].play_id == p.play_id);
        CHECK(r.results[0].distance == 0.0);
        CHECK(r.results[0].rank == 1);
      }
    }
  }

  TEST_CASE("scrambled self query still ranks first") {
    const auto& f = shared();
    const pa::PermutationMap perm({4, 3, 0, 2, 1});
    for (std::size_t i = 3; i < f.store->size(); i += 13) {
      const pa::Play& p = f.store->plays()[i];
      pa::Play s = pa::apply_permutation(p, perm, pa::TeamScope::offense);
      s = pa::apply_permutation(s, perm.inverse(), pa::TeamScope::defense);
      const auto r = pa::run_query(f.index, query_for(s));
      REQUIRE_FALSE(r.results.empty());
      CHECK(r.results[0].play_id == p.play_id);
      CHECK(r.results[0].distance == 0.0);
      // Correspondence maps query agents back onto the stored play.
      const pa::Play back = pa::in_query_order(p, r.results[0]);
      CHECK(back.coords == s.coords);
    }
  }

  TEST_CASE("ball only ranking follows ball distance") {
    const auto& f = shared();
    const pa::Play& p = f.store->plays()[5];
    auto q = query_for(p, pa::AgentSubset::ball_only());
    q.k = 1000;
    const auto r = pa::run_query(f.index, q);
    const auto qb = pa::flatten(p, pa::AgentSubset::ball_only());
    for (const auto& x : r.results) {
      const auto cb = pa::flatten(f.store->at(x.play_id), pa::AgentSubset::ball_only());
      double s = 0.0;
      for (std::size_t i = 0; i < qb.size(); ++i) s += (qb[i] - cb[i]) * (qb[i] - cb[i]);
      CHECK(x.distance == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < r.results.size(); ++i) {
      CHECK(r.results[i - 1].distance <= r.results[i].distance);
    }
    CHECK(r.results.size() == r.candidates);
  }

  TEST_CASE("k caps results without padding") {
    const Fixture tiny(1, 3, 2000);
    auto q = query_for(tiny.store->plays()[0]);
    q.k = 10;
    CHECK(pa::run_query(tiny.index, q).results.size() == 3);
    q.k = 2;
    CHECK(pa::run_query(tiny.index, q).results.size() == 2);
  }

  TEST_CASE("single play index") {
    auto store = std::make_shared<pa::PlayStore>();
    store->add(pa::testing::random_play(1, 4, 5, "only"));
    pa::IndexConfig ic(1);
    ic.with_baseline = false;
    const auto index = pa::build_index(store, ic);
    const auto r = pa::run_query(index, query_for(store->at("only")));
    REQUIRE(r.results.size() == 1);
    CHECK(r.results[0].distance == 0.0);
  }

  TEST_CASE("boosts rescale and keep equal boosts stable") {
    const auto& f = shared();
    const pa::Play& p = f.store->plays()[7];
    auto q = query_for(p, pa::AgentSubset::players(5));
    q.k = 1000;
    const auto plain = pa::run_query(f.index, q);
    REQUIRE(plain.results.size() > 4);
    const std::string lifted = plain.results[3].play_id;
    q.play_boosts[lifted] = 1e9;
    const auto boosted = pa::run_query(f.index, q);
    CHECK(boosted.results[0].play_id == p.play_id);  // distance 0 stays first
    CHECK(boosted.results[1].play_id == lifted);
    std::vector<std::string> rest_plain, rest_boosted;
    for (const auto& x : plain.results) {
      if (x.play_id != lifted) rest_plain.push_back(x.play_id);
    }
    for (const auto& x : boosted.results) {
      if (x.play_id != lifted) rest_boosted.push_back(x.play_id);
    }
    CHECK(rest_plain == rest_boosted);
    // A uniform game boost rescales scores but keeps the order.
    pa::Query g = query_for(p, pa::AgentSubset::players(5));
    g.k = 1000;
    for (const auto& x : plain.results) g.game_boosts[x.game_id] = 2.0;
    const auto uniform = pa::run_query(f.index, g);
    CHECK(ids(uniform) == ids(plain));
    CHECK(uniform.results[1].score == plain.results[1].distance / 2.0);
  }

  TEST_CASE("missing agents are imputed") {
    const auto& f = shared();
    const pa::Play& p = f.store->plays()[9];
    pa::Play holes = p;
    for (std::size_t fr = 0; fr < holes.frame_count(); ++fr) {
      holes.coords[fr * holes.stride() + 2 * 2] = std::numeric_limits<double>::quiet_NaN();
      holes.coords[fr * holes.stride() + 2 * 2 + 1] =
          std::numeric_limits<double>::quiet_NaN();
    }
    pa::AgentSubset sel{0b00011u, 0u, true};
    const auto r = pa::run_query(f.index, query_for(holes, sel));
    CHECK(r.imputed_offense == std::vector<int>{2});
    CHECK(r.imputed_defense.empty());
    REQUIRE_FALSE(r.results.empty());
    CHECK(r.results[0].play_id == p.play_id);
    sel.offense = 0b00100u;
    CHECK_THROWS_AS(pa::run_query(f.index, query_for(holes, sel)), pa::InvalidArgument);
    pa::Play partial = p;
    partial.coords[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pa::run_query(f.index, query_for(partial)), pa::InvalidArgument);
  }

  TEST_CASE("query validation") {
    const auto& f = shared();
    const pa::Play& p = f.store->plays()[0];
    auto q = query_for(p, pa::AgentSubset::players(5));
    q.method = pa::Method::baseline;
    CHECK_THROWS_AS(pa::run_query(f.index, q), pa::InvalidArgument);
    q = query_for(p);
    q.k = 0;
    CHECK_THROWS_AS(pa::run_query(f.index, q), pa::InvalidArgument);
    q = query_for(p);
    q.play_boosts["x"] = 0.5;
    CHECK_THROWS_AS(pa::run_query(f.index, q), pa::InvalidArgument);
    q = query_for(p);
    q.selected.offense = 1u << 7;
    CHECK_THROWS_AS(pa::run_query(f.index, q), pa::InvalidArgument);
    q = query_for(pa::testing::random_play(1, 2));
    CHECK_THROWS_AS(pa::run_query(f.index, q), pa::InvalidArgument);
    q = query_for(p);
    q.play.coords.resize(q.play.stride() * 90);
    CHECK_THROWS_AS(pa::run_query(f.index, q), pa::DimensionError);
    CHECK(pa::parse_method("baseline") == pa::Method::baseline);
    CHECK_THROWS_AS(pa::parse_method("lsh"), pa::InvalidArgument);
  }

  TEST_CASE("probing more leaves widens the candidate set") {
    const Fixture f(4, 60, 40);
    const pa::Play& p = f.store->plays()[0];
    auto q = query_for(p);
    q.k = 1000;
    const auto one = pa::run_query(f.index, q);
    q.probe_leaves = 3;
    const auto three = pa::run_query(f.index, q);
    CHECK(three.candidates >= one.candidates);
    CHECK(three.results[0].play_id == p.play_id);
  }

  TEST_CASE("baseline buckets follow the ball only") {
    const auto& f = shared();
    const pa::Play& p = f.store->plays()[2];
    pa::Play other = p;
    for (std::size_t fr = 0; fr < other.frame_count(); ++fr) {
      for (int a = 0; a < 10; ++a) other.coords[fr * other.stride() + 2 * a] += 3.0;
    }
    auto q1 = query_for(p);
    q1.method = pa::Method::baseline;
    auto q2 = query_for(other);
    q2.method = pa::Method::baseline;
    CHECK(pa::run_query(f.index, q1).leaf == pa::run_query(f.index, q2).leaf);
  }

  TEST_CASE("index stats and determinism") {
    const auto& f = shared();
    const auto stats = pa::index_stats(f.index);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].plays == f.store->size());
    CHECK(stats[0].largest_leaf <= 50);
    CHECK(stats[0].baseline_clusters == static_cast<int>(stats[0].leaves));
    pa::IndexConfig ic(3);
    ic.tree.max_leaf_size = 50;
    const auto again = pa::build_index(f.store, ic);
    std::ostringstream a, b;
    pa::write_index(a, f.index);
    pa::write_index(b, again);
    CHECK(a.str() == b.str());
    const auto q = query_for(f.store->plays()[4], pa::AgentSubset::players(5));
    CHECK(ids(pa::run_query(f.index, q)) == ids(pa::run_query(again, q)));
  }
}
