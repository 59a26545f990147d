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

#include "playalign/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "playalign/errors.hpp"

namespace playalign {

const char* to_string(TeamScope team) {
  return team == TeamScope::offense ? "offense" : "defense";
}

Frame Play::frame(std::size_t index) const {
  Frame f;
  f.timestamp = timestamp(index);
  const int n = agent_count();
  f.agents.reserve(n);
  for (int a = 0; a < n; ++a) f.agents.push_back(agent(index, a));
  f.ball = ball(index);
  f.team_ids = team_ids;
  f.player_ids = player_ids;
  if (!actions.empty()) {
    const int* row = actions.data() + index * (n + 1);
    f.actions.assign(row, row + n);
    f.ball_action = row[n];
  }
  return f;
}

Play Play::from_frames(std::string play_id, std::string game_id,
                       int window_seconds, double sample_rate,
                       TeamSplit split, std::span<const Frame> frames) {
  Play play;
  play.play_id = std::move(play_id);
  play.game_id = std::move(game_id);
  play.window_seconds = window_seconds;
  play.sample_rate = sample_rate;
  play.team_split = split;
  if (frames.empty()) return play;
  play.start_time = frames.front().timestamp;
  const int n = play.agent_count();
  play.coords.reserve(frames.size() * play.stride());
  bool any_action = false;
  for (const Frame& f : frames) {
    if (static_cast<int>(f.agents.size()) != n) {
      throw DimensionError("frame at t=" + std::to_string(f.timestamp) +
                           " has " + std::to_string(f.agents.size()) +
                           " agents, expected " + std::to_string(n));
    }
    for (const Vec2& p : f.agents) {
      play.coords.push_back(p.x);
      play.coords.push_back(p.y);
    }
    play.coords.push_back(f.ball.x);
    play.coords.push_back(f.ball.y);
    play.coords.push_back(f.ball.z);
    any_action = any_action || f.ball_action != 0 ||
                 std::any_of(f.actions.begin(), f.actions.end(),
                             [](int a) { return a != 0; });
  }
  play.team_ids = frames.front().team_ids;
  play.player_ids = frames.front().player_ids;
  if (any_action) {
    play.actions.reserve(frames.size() * (n + 1));
    for (const Frame& f : frames) {
      for (int a = 0; a < n; ++a) {
        play.actions.push_back(a < static_cast<int>(f.actions.size())
                                   ? f.actions[a]
                                   : 0);
      }
      play.actions.push_back(f.ball_action);
    }
  }
  return play;
}

bool operator==(const Play& a, const Play& b) {
  return a.play_id == b.play_id && a.game_id == b.game_id &&
         a.start_time == b.start_time &&
         a.window_seconds == b.window_seconds &&
         a.sample_rate == b.sample_rate && a.team_split == b.team_split &&
         a.coords == b.coords && a.team_ids == b.team_ids &&
         a.player_ids == b.player_ids && a.actions == b.actions;
}

AgentSubset AgentSubset::all(int agents_per_team) {
  const std::uint32_t m = (1u << agents_per_team) - 1u;
  return {m, m, true};
}

AgentSubset AgentSubset::players(int agents_per_team) {
  const std::uint32_t m = (1u << agents_per_team) - 1u;
  return {m, m, false};
}

int AgentSubset::agent_count() const {
  return std::popcount(offense) + std::popcount(defense) + (ball ? 1 : 0);
}

bool is_bijection(std::span<const int> mapping) {
  std::vector<char> seen(mapping.size(), 0);
  for (int v : mapping) {
    if (v < 0 || v >= static_cast<int>(mapping.size()) || seen[v]) {
      return false;
    }
    seen[v] = 1;
  }
  return true;
}

PermutationMap::PermutationMap(std::vector<int> mapping)
    : mapping_(std::move(mapping)) {
  if (!is_bijection(mapping_)) {
    throw InvalidArgument("permutation map is not a bijection");
  }
}

PermutationMap PermutationMap::identity(int size) {
  PermutationMap p;
  p.mapping_.resize(size);
  for (int i = 0; i < size; ++i) p.mapping_[i] = i;
  return p;
}

PermutationMap PermutationMap::inverse() const {
  PermutationMap inv;
  inv.mapping_.resize(mapping_.size());
  for (int s = 0; s < size(); ++s) inv.mapping_[mapping_[s]] = s;
  return inv;
}

bool PermutationMap::is_identity() const {
  for (int s = 0; s < size(); ++s) {
    if (mapping_[s] != s) return false;
  }
  return true;
}

PermutationMap compose(const PermutationMap& first,
                       const PermutationMap& second) {
  if (first.size() != second.size()) {
    throw DimensionError("cannot compose permutations of different sizes");
  }
  std::vector<int> out(first.size());
  for (int s = 0; s < first.size(); ++s) out[s] = first[second[s]];
  return PermutationMap(std::move(out));
}

CostMatrix::CostMatrix(int size, std::vector<double> row_major)
    : size_(size), entries_(std::move(row_major)) {
  if (size < 0 || entries_.size() != static_cast<std::size_t>(size) * size) {
    throw DimensionError("cost matrix is not square");
  }
}

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : size_(static_cast<int>(rows.size())) {
  entries_.reserve(rows.size() * rows.size());
  for (const auto& row : rows) {
    if (row.size() != rows.size()) {
      throw DimensionError("cost matrix is not square");
    }
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

std::vector<Violation> validate_play(const Play& play,
                                     const RosterConfig& config) {
  std::vector<Violation> out;
  auto add = [&out](std::string msg) { out.push_back({std::move(msg)}); };

  const TeamSplit& split = play.team_split;
  if (split.offense.count != config.agents_per_team ||
      split.defense.count != config.agents_per_team) {
    std::ostringstream os;
    os << "agent count " << split.offense.count << "+"
       << split.defense.count << " != " << config.agents_per_team << "+"
       << config.agents_per_team;
    add(os.str());
  }
  const int n = play.agent_count();
  if (split.offense.begin < 0 || split.defense.begin < 0 ||
      split.offense.begin + split.offense.count > n ||
      split.defense.begin + split.defense.count > n ||
      (split.offense.begin < split.defense.begin + split.defense.count &&
       split.defense.begin < split.offense.begin + split.offense.count)) {
    add("team split ranges overlap or exceed the agent count");
  }
  if (play.sample_rate != config.sample_rate) {
    std::ostringstream os;
    os << "sample rate " << play.sample_rate << " != " << config.sample_rate;
    add(os.str());
  }
  if (play.window_seconds < 1 || play.window_seconds > 5) {
    add("window length " + std::to_string(play.window_seconds) +
        " s outside 1..5");
  }
  if (play.coords.size() % play.stride() != 0) {
    add("coordinate buffer is not a whole number of frames");
  }
  const std::size_t frames = play.frame_count();
  const auto expected = static_cast<std::size_t>(
      std::llround(play.window_seconds * config.sample_rate));
  if (frames != expected) {
    add("frame count " + std::to_string(frames) +
        " ≠ " + std::to_string(expected));
  }
  if (!play.team_ids.empty() && static_cast<int>(play.team_ids.size()) != n) {
    add("team id list does not match agent count");
  }
  if (!play.player_ids.empty() &&
      static_cast<int>(play.player_ids.size()) != n) {
    add("player id list does not match agent count");
  }
  if (!play.actions.empty() && play.actions.size() != frames * (n + 1)) {
    add("action list does not match frame count");
  }

  bool reported_bounds = false;
  bool reported_finite = false;
  for (std::size_t f = 0; f < frames; ++f) {
    for (int a = 0; a < n; ++a) {
      const Vec2 p = play.agent(f, a);
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        if (!reported_finite) {
          add("non-finite position for agent " + std::to_string(a) +
              " at frame " + std::to_string(f));
          reported_finite = true;
        }
      } else if (p.x < 0.0 || p.x > kCourtLength || p.y < 0.0 ||
                 p.y > kCourtWidth) {
        if (!reported_bounds) {
          std::ostringstream os;
          os << "out of bounds: agent " << a << " at frame " << f << " ("
             << p.x << ", " << p.y << ")";
          add(os.str());
          reported_bounds = true;
        }
      }
    }
    const Vec3 b = play.ball(f);
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.z)) {
      if (!reported_finite) {
        add("non-finite ball position at frame " + std::to_string(f));
        reported_finite = true;
      }
    } else if (b.x < 0.0 || b.x > kCourtLength || b.y < 0.0 ||
               b.y > kCourtWidth || b.z < 0.0) {
      if (!reported_bounds) {
        std::ostringstream os;
        os << "out of bounds: ball at frame " << f << " (" << b.x << ", "
           << b.y << ", " << b.z << ")";
        add(os.str());
        reported_bounds = true;
      }
    }
  }
  return out;
}

std::size_t flattened_size(const Play& play, const AgentSubset& scope) {
  const int agents = std::popcount(scope.offense) + std::popcount(scope.defense);
  return play.frame_count() * (2 * agents + (scope.ball ? 3 : 0));
}

void flatten_into(const Play& play, const AgentSubset& scope,
                  std::span<double> out) {
  if (scope.empty()) throw InvalidArgument("flatten: empty scope");
  const int per_team = play.agents_per_team();
  const std::uint32_t valid = per_team >= 32 ? ~0u : (1u << per_team) - 1u;
  if ((scope.offense & ~valid) != 0 || (scope.defense & ~valid) != 0) {
    throw InvalidArgument("flatten: scope names agents outside the roster");
  }
  if (out.size() != flattened_size(play, scope)) {
    throw DimensionError("flatten: output buffer has the wrong size");
  }
  std::vector<int> columns;
  for (TeamScope team : {TeamScope::offense, TeamScope::defense}) {
    const AgentRange& r = play.team_split.range(team);
    for (int s = 0; s < r.count; ++s) {
      if (scope.mask(team) >> s & 1u) {
        columns.push_back(2 * (r.begin + s));
        columns.push_back(2 * (r.begin + s) + 1);
      }
    }
  }
  if (scope.ball) {
    const int b = 2 * play.agent_count();
    columns.insert(columns.end(), {b, b + 1, b + 2});
  }
  const std::size_t stride = play.stride();
  std::size_t k = 0;
  for (std::size_t f = 0; f < play.frame_count(); ++f) {
    const double* row = play.coords.data() + f * stride;
    for (int c : columns) out[k++] = row[c];
  }
}

std::vector<double> flatten(const Play& play, const AgentSubset& scope) {
  if (scope.empty()) throw InvalidArgument("flatten: empty scope");
  std::vector<double> out(flattened_size(play, scope));
  flatten_into(play, scope, out);
  return out;
}

}  // namespace playalign
