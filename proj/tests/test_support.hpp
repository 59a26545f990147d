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

#pragma once

#include <string>
#include <vector>

#include "playalign/model.hpp"
#include "playalign/util.hpp"

namespace playalign::testing {

// A valid play with smooth random motion inside the court.
inline Play random_play(std::uint64_t seed, int window_seconds = 4,
                        int per_team = 5, std::string id = "p") {
  Rng rng(seed);
  Play play;
  play.play_id = std::move(id);
  play.game_id = "g";
  play.window_seconds = window_seconds;
  play.sample_rate = 25.0;
  play.team_split = TeamSplit::standard(per_team);
  const int frames = window_seconds * 25;
  const int n = 2 * per_team;
  play.coords.resize(static_cast<std::size_t>(frames) * play.stride());
  std::vector<Vec2> start(n), vel(n);
  for (int a = 0; a < n; ++a) {
    start[a] = {rng.uniform(20.0, 74.0), rng.uniform(10.0, 40.0)};
    vel[a] = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
  }
  for (int f = 0; f < frames; ++f) {
    double* row = play.coords.data() + f * play.stride();
    for (int a = 0; a < n; ++a) {
      row[2 * a] = start[a].x + vel[a].x * f;
      row[2 * a + 1] = start[a].y + vel[a].y * f;
    }
    row[2 * n] = start[0].x + 0.5;
    row[2 * n + 1] = start[0].y;
    row[2 * n + 2] = 4.0;
  }
  return play;
}

inline Template template_from_play(const Play& play, TeamScope team) {
  const AgentRange r = play.team_split.range(team);
  Template t;
  t.team = team;
  t.slots = r.count;
  t.frames = static_cast<int>(play.frame_count());
  for (int s = 0; s < r.count; ++s) {
    for (int f = 0; f < t.frames; ++f) {
      const Vec2 p = play.agent(f, r.begin + s);
      t.positions.push_back(p.x);
      t.positions.push_back(p.y);
    }
  }
  return t;
}

}  // namespace playalign::testing
