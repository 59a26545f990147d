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

#include <numeric>
#include <sstream>

#include "playalign/metrics.hpp"
#include "playalign/synthetic.hpp"
#include "playalign/util.hpp"

namespace pa = playalign;

namespace {

std::vector<std::string> list(std::initializer_list<const char*> v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("within cluster error") {
    const std::vector<double> pair{-1, 1};
    const std::vector<int> zero{0, 0};
    CHECK(pa::within_cluster_error(pa::DataView::dense(pair, 1), zero, 1) == 1.0);
    const std::vector<double> four{0, 1, 10, 11};
    const std::vector<int> two{0, 0, 1, 1};
    CHECK(pa::within_cluster_error(pa::DataView::dense(four, 1), two, 2) == 0.5);
    const std::vector<int> single{0, 1, 2, 3};
    CHECK(pa::within_cluster_error(pa::DataView::dense(four, 1), single, 4) == 0.0);
  }

  TEST_CASE("variance explained") {
    std::vector<double> line;
    for (int i = 0; i < 20; ++i) {
      line.push_back(i);
      line.push_back(2.0 * i + 1.0);
    }
    const auto l = pa::variance_explained(pa::DataView::dense(line, 2));
    REQUIRE_FALSE(l.empty());
    CHECK(l[0] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i] == 0.0);

    pa::Rng rng(3);
    std::vector<double> iso;
    for (int i = 0; i < 20000; ++i) {
      iso.push_back(rng.normal());
      iso.push_back(rng.normal());
    }
    const auto r = pa::variance_explained(pa::DataView::dense(iso, 2));
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[1] - 0.5) < 0.05);
    CHECK(std::abs(r[0] - 0.5) < 0.05);

    std::vector<double> wide;
    for (int i = 0; i < 30; ++i) {
      for (int d = 0; d < 50; ++d) wide.push_back(rng.uniform() * (d + 1));
    }
    const auto w = pa::variance_explained(pa::DataView::dense(wide, 50));
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0));
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] <= w[i - 1]);

    const std::vector<double> flat(10, 2.0);
    CHECK(pa::variance_explained(pa::DataView::dense(flat, 2)).empty());
  }

  TEST_CASE("average precision and reciprocal rank") {
    CHECK(pa::average_precision(list({"a", "b"}), {"a", "b"}) == 1.0);
    CHECK(pa::average_precision(list({"a", "b", "c"}), {"a", "c"}) ==
          doctest::Approx(0.8333333333333334).epsilon(1e-12));
    CHECK(pa::average_precision(list({"a", "b"}), {"z"}) == 0.0);
    CHECK(pa::average_precision(list({"x", "y", "z"}), {"x", "z"}) ==
          pa::average_precision(list({"a", "b", "c"}), {"a", "c"}));
    CHECK(pa::expected_reciprocal_rank(list({"a", "b"}), {"a"}) == 1.0);
    CHECK(pa::expected_reciprocal_rank(list({"a", "b", "c", "d"}), {"d"}) == 0.25);
    CHECK(pa::expected_reciprocal_rank(list({"a"}), {"b"}) == 0.0);
  }

  TEST_CASE("team draft interleaving") {
    const auto a = list({"p1", "p2"});
    const auto b = list({"p3", "p4"});
    const auto items = pa::team_draft_interleave(a, b, [] { return true; });
    REQUIRE(items.size() == 4);
    CHECK(items[0].play_id == "p1");
    CHECK(items[1].play_id == "p3");
    CHECK(items[2].play_id == "p2");
    CHECK(items[3].play_id == "p4");
    CHECK(items[0].credit == pa::Team::a);
    CHECK(items[1].credit == pa::Team::b);

    const auto same = list({"q1", "q2", "q3"});
    const auto shared = pa::team_draft_interleave(same, same, 7);
    REQUIRE(shared.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(shared[i].play_id == same[i]);
      CHECK(shared[i].credit == pa::Team::both);
    }

    const auto outcome = pa::interleave_outcome(items, {"p1", "p4"});
    CHECK(outcome.a_wins == 1);
    CHECK(outcome.b_wins == 1);
    CHECK(pa::team_draft_interleave(a, b, 5).size() ==
          pa::team_draft_interleave(a, b, 5).size());
  }

  TEST_CASE("judgments and rankings files") {
    std::istringstream j("query_id,play_id,relevant\nq1,a,1\nq1,b,0\nq2,c,1\n");
    const auto judg = pa::Judgments::read(j);
    CHECK(judg.relevant("q1", "a"));
    CHECK_FALSE(judg.relevant("q1", "b"));
    CHECK_FALSE(judg.relevant("q1", "zz"));
    CHECK(judg.relevant_set("q2") == std::set<std::string>{"c"});
    CHECK(judg.queries() == list({"q1", "q2"}));
    std::ostringstream out;
    judg.write(out);
    std::istringstream again(out.str());
    CHECK(pa::Judgments::read(again).relevant_set("q1") == judg.relevant_set("q1"));

    const std::vector<pa::RankingRow> rows{{"q1", "tree", 2, "b"},
                                           {"q1", "tree", 1, "a"},
                                           {"q1", "baseline", 1, "c"}};
    std::stringstream rs;
    pa::write_rankings(rs, rows);
    const auto back = pa::read_rankings(rs);
    CHECK(back.at("q1").at("tree") == list({"a", "b"}));
    CHECK(back.at("q1").at("baseline") == list({"c"}));
  }

  TEST_CASE("compressibility of identical plays") {
    pa::SyntheticConfig cfg;
    cfg.formations = 1;
    cfg.plays_per_formation = 1;
    cfg.seed = 2;
    const pa::Play p = pa::generate_synthetic(cfg).plays[0];
    std::vector<pa::Play> plays(30, p);
    for (std::size_t i = 0; i < plays.size(); ++i) plays[i].play_id = std::to_string(i);
    const auto tree = pa::grow_tree(plays, pa::TreeConfig(1));
    pa::CompressibilityConfig cc;
    cc.k_values = {1};
    const auto report = pa::compressibility_report(plays, tree, cc);
    for (const char* name : {"identity", "role", "tree"}) {
      CHECK(report.at(name).wce.at(0).second < 1e-9);
    }
    std::ostringstream csv;
    report.write_wce_csv(csv);
    CHECK(csv.str().rfind("alignment,k,wce", 0) == 0);
  }

  TEST_CASE("compressibility on a small multi formation corpus") {
    pa::SyntheticConfig cfg;
    cfg.formations = 4;
    cfg.plays_per_formation = 40;
    cfg.seed = 12;
    const auto plays = pa::generate_synthetic(cfg).plays;
    pa::TreeConfig tc(3);
    tc.max_leaf_size = 50;
    const auto tree = pa::grow_tree(plays, tc);
    pa::CompressibilityConfig cc;
    cc.k_values = {5, 10};
    const auto r = pa::compressibility_report(plays, tree, cc);
    for (std::size_t i = 0; i < cc.k_values.size(); ++i) {
      CHECK(r.at("role").wce[i].second < r.at("identity").wce[i].second);
      CHECK(r.at("tree").wce[i].second <= r.at("role").wce[i].second);
    }
    // WCE shrinks as K grows.
    for (const auto& a : r.alignments) CHECK(a.wce[1].second <= a.wce[0].second);
  }
}
