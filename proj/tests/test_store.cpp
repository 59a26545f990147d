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

#include <filesystem>
#include <sstream>

#include "playalign/errors.hpp"
#include "playalign/play_store.hpp"
#include "test_support.hpp"

namespace pa = playalign;
using pa::testing::random_play;

TEST_SUITE("store") {
  TEST_CASE("add, find and reject duplicates") {
    pa::PlayStore s;
    s.add(random_play(1, 4, 5, "a"));
    s.add(random_play(2, 2, 5, "b"));
    CHECK(s.size() == 2);
    CHECK(s.find("a") != nullptr);
    CHECK(s.find("zz") == nullptr);
    CHECK(s.at("b").window_seconds == 2);
    CHECK_THROWS_AS(s.at("zz"), pa::NotFound);
    CHECK_THROWS_AS(s.add(random_play(3, 4, 5, "a")), pa::InvalidArgument);
    CHECK(s.window_lengths() == std::vector<int>{2, 4});
    CHECK(s.with_window(4).size() == 1);
  }

  TEST_CASE("text round trip keeps plays exactly") {
    pa::PlayStore s;
    pa::Play a = random_play(4, 3, 5, "g:3s:0");
    a.team_ids = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2};
    a.player_ids = {3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    a.start_time = 12.36;
    a.coords[5] = 1.0 / 3.0;
    pa::Play b = random_play(5, 1, 5, "g:1s:7");
    b.actions.assign(b.frame_count() * 11, 0);
    b.actions[3] = 2;
    s.add(a);
    s.add(b);
    s.add(random_play(6, 2, 5, "c"));
    std::stringstream io;
    s.write(io);
    const pa::PlayStore back = pa::PlayStore::read(io);
    REQUIRE(back.size() == 3);
    CHECK(back.at("g:3s:0") == a);
    CHECK(back.at("g:1s:7") == b);
    CHECK(back.at("c").team_ids.empty());

    const auto path = std::filesystem::temp_directory_path() / "playalign_store.txt";
    s.save(path);
    CHECK(pa::PlayStore::load(path).at("c") == s.at("c"));
    std::filesystem::remove(path);
  }

  TEST_CASE("malformed input") {
    std::istringstream stray("1,1,1,0,1,1,0\n");
    CHECK_THROWS_AS(pa::PlayStore::read(stray), pa::ParseError);
    pa::PlayStore s;
    s.add(random_play(7, 1, 5, "x"));
    std::stringstream io;
    s.write(io);
    std::string text = io.str();
    text.resize(text.size() / 2);
    std::istringstream truncated(text);
    CHECK_THROWS_AS(pa::PlayStore::read(truncated), pa::ParseError);
    CHECK_THROWS_AS(pa::PlayStore::load("/nonexistent/store.txt"), pa::NotFound);
  }
}
