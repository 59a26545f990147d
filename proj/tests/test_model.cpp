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

#include "playalign/assignment.hpp"
#include "playalign/errors.hpp"
#include "playalign/model.hpp"
#include "test_support.hpp"

namespace pa = playalign;
using pa::testing::random_play;

namespace {

bool has_violation(const std::vector<pa::Violation>& v, const std::string& s) {
  for (const auto& x : v) {
    if (x.message.find(s) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("well formed play validates") {
    CHECK(pa::validate_play(random_play(1), {}).empty());
  }

  TEST_CASE("short play reports its frame count") {
    pa::Play p = random_play(1);
    p.coords.resize(99 * p.stride());
    const auto v = pa::validate_play(p, {});
    CHECK(has_violation(v, "frame count 99 ≠ 100"));
  }

  TEST_CASE("agent off the court is out of bounds") {
    pa::Play p = random_play(1);
    p.coords[0] = -3.0;
    CHECK(has_violation(pa::validate_play(p, {}), "out of bounds"));
  }

  TEST_CASE("flatten lengths") {
    const pa::Play p4 = random_play(2);
    CHECK(pa::flatten(p4, pa::AgentSubset::all(5)).size() == 2300);
    CHECK(pa::flatten(p4, pa::AgentSubset::ball_only()).size() == 300);
    const pa::Play p2 = random_play(3, 2);
    const pa::AgentSubset two{1u, 1u, true};
    CHECK(pa::flatten(p2, two).size() == 350);
    CHECK(pa::flattened_size(p2, two) == 350);
    CHECK_THROWS_AS(pa::flatten(p4, pa::AgentSubset{}), pa::InvalidArgument);
  }

  TEST_CASE("flatten is frame major") {
    const pa::Play p = random_play(4);
    const pa::AgentSubset s{0b10u, 0b1u, true};
    const auto v = pa::flatten(p, s);
    for (std::size_t f : {std::size_t{0}, std::size_t{57}}) {
      const double* row = v.data() + f * 7;
      CHECK(row[0] == p.agent(f, 1).x);
      CHECK(row[1] == p.agent(f, 1).y);
      CHECK(row[2] == p.agent(f, 5).x);
      CHECK(row[3] == p.agent(f, 5).y);
      CHECK(row[4] == p.ball(f).x);
      CHECK(row[6] == p.ball(f).z);
    }
  }

  TEST_CASE("flatten distinguishes plays differing in scope") {
    const pa::Play a = random_play(5);
    pa::Play b = a;
    b.coords[2 * 3 + 1] += 1e-9;
    const auto all = pa::AgentSubset::all(5);
    CHECK(pa::flatten(a, all) != pa::flatten(b, all));
  }

  TEST_CASE("permutation map algebra") {
    const pa::PermutationMap p({2, 0, 1});
    const pa::PermutationMap q({1, 2, 0});
    CHECK(pa::compose(p, q) == pa::PermutationMap({0, 1, 2}));
    CHECK(p.inverse() == q);
    CHECK(pa::compose(p, p.inverse()).is_identity());
    CHECK_THROWS_AS(pa::PermutationMap({0, 0, 1}), pa::InvalidArgument);
    CHECK_FALSE(pa::is_bijection(std::vector<int>{0, 3, 1}));
  }

  TEST_CASE("compose matches sequential application") {
    const pa::Play play = random_play(6);
    const pa::PermutationMap p({3, 1, 4, 0, 2});
    const pa::PermutationMap q({1, 0, 3, 4, 2});
    const pa::Play seq = pa::apply_permutation(
        pa::apply_permutation(play, p, pa::TeamScope::offense), q,
        pa::TeamScope::offense);
    const pa::Play once =
        pa::apply_permutation(play, pa::compose(p, q), pa::TeamScope::offense);
    CHECK(seq.coords == once.coords);
  }

  TEST_CASE("play frame round trip") {
    const pa::Play p = random_play(7);
    std::vector<pa::Frame> frames;
    for (std::size_t f = 0; f < p.frame_count(); ++f) {
      frames.push_back(p.frame(f));
    }
    const pa::Play q = pa::Play::from_frames(p.play_id, p.game_id, 4, 25.0,
                                             p.team_split, frames);
    CHECK(q.coords == p.coords);
  }

  TEST_CASE("cost matrix shape checks") {
    CHECK_THROWS_AS(pa::CostMatrix(2, {1.0, 2.0, 3.0}), pa::DimensionError);
    const pa::CostMatrix m{{1, 2}, {3, 4}};
    CHECK(m(1, 0) == 3.0);
  }
}
