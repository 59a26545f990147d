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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace playalign {

inline constexpr double kCourtLength = 94.0;
inline constexpr double kCourtWidth = 50.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

enum class TeamScope { offense, defense };

const char* to_string(TeamScope team);

struct RosterConfig {
  int agents_per_team = 5;
  int team_count = 2;
  double sample_rate = 25.0;  // Hz

  int agent_count() const { return agents_per_team * team_count; }
};

struct AgentRange {
  int begin = 0;
  int count = 0;
  friend bool operator==(const AgentRange&, const AgentRange&) = default;
};

struct TeamSplit {
  AgentRange offense;
  AgentRange defense;

  static TeamSplit standard(int agents_per_team) {
    return {{0, agents_per_team}, {agents_per_team, agents_per_team}};
  }
  const AgentRange& range(TeamScope team) const {
    return team == TeamScope::offense ? offense : defense;
  }
  friend bool operator==(const TeamSplit&, const TeamSplit&) = default;
};

// One sample of every tracked agent. `team_ids`, `player_ids` and `actions`
// are parallel to `agents`; they are empty when the source carries no
// identities.
struct Frame {
  double timestamp = 0.0;
  std::vector<Vec2> agents;
  Vec3 ball;
  std::vector<int> team_ids;
  std::vector<int> player_ids;
  std::vector<int> actions;
  int ball_action = 0;
};

// A fixed-length window of agent positions stored densely in the
// frame-major layout used by `flatten` with the full scope: per frame the
// offense (x, y) pairs, the defense (x, y) pairs, then ball (x, y, z).
struct Play {
  std::string play_id;
  std::string game_id;
  double start_time = 0.0;
  int window_seconds = 0;
  double sample_rate = 25.0;
  TeamSplit team_split;
  std::vector<double> coords;
  std::vector<int> team_ids;    // per agent, may be empty
  std::vector<int> player_ids;  // per agent, may be empty
  std::vector<int> actions;     // per frame, agents then ball; empty = none

  int agent_count() const {
    return team_split.offense.count + team_split.defense.count;
  }
  int agents_per_team() const { return team_split.offense.count; }
  std::size_t stride() const { return 2 * agent_count() + 3; }
  std::size_t frame_count() const {
    return stride() == 0 ? 0 : coords.size() / stride();
  }
  double timestamp(std::size_t frame) const {
    return start_time + static_cast<double>(frame) / sample_rate;
  }
  Vec2 agent(std::size_t frame, int agent) const {
    const double* p = coords.data() + frame * stride() + 2 * agent;
    return {p[0], p[1]};
  }
  Vec3 ball(std::size_t frame) const {
    const double* p = coords.data() + frame * stride() + 2 * agent_count();
    return {p[0], p[1], p[2]};
  }
  Frame frame(std::size_t index) const;

  static Play from_frames(std::string play_id, std::string game_id,
                          int window_seconds, double sample_rate,
                          TeamSplit split, std::span<const Frame> frames);
};

bool operator==(const Play& a, const Play& b);

// Which trajectories take part in a distance: slot bits per team plus the
// ball. Slots refer to positions inside the team's agent range.
struct AgentSubset {
  std::uint32_t offense = 0;
  std::uint32_t defense = 0;
  bool ball = false;

  static AgentSubset all(int agents_per_team);
  static AgentSubset players(int agents_per_team);
  static AgentSubset ball_only() { return {0, 0, true}; }

  std::uint32_t mask(TeamScope team) const {
    return team == TeamScope::offense ? offense : defense;
  }
  bool empty() const { return offense == 0 && defense == 0 && !ball; }
  int agent_count() const;
  friend bool operator==(const AgentSubset&, const AgentSubset&) = default;
};

// mapping[slot] is the source agent placed into that slot.
class PermutationMap {
 public:
  PermutationMap() = default;
  explicit PermutationMap(std::vector<int> mapping);

  static PermutationMap identity(int size);

  int size() const { return static_cast<int>(mapping_.size()); }
  int operator[](int slot) const { return mapping_[slot]; }
  std::span<const int> mapping() const { return mapping_; }
  PermutationMap inverse() const;
  bool is_identity() const;

  friend bool operator==(const PermutationMap&, const PermutationMap&) =
      default;
  friend auto operator<=>(const PermutationMap&, const PermutationMap&) =
      default;

 private:
  std::vector<int> mapping_;
};

// The map equivalent to applying `first` and then `second`.
PermutationMap compose(const PermutationMap& first,
                       const PermutationMap& second);

bool is_bijection(std::span<const int> mapping);

class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(int size) : size_(size), entries_(size * size, 0.0) {}
  CostMatrix(int size, std::vector<double> row_major);
  CostMatrix(std::initializer_list<std::initializer_list<double>> rows);

  int size() const { return size_; }
  double operator()(int row, int col) const {
    return entries_[row * size_ + col];
  }
  double& operator()(int row, int col) { return entries_[row * size_ + col]; }
  std::span<const double> entries() const { return entries_; }

 private:
  int size_ = 0;
  std::vector<double> entries_;
};

enum class TemplateGranularity { trajectory, mean_position };

// Canonical slot trajectories for one team, slot-major: for each slot its
// `frames` (x, y) pairs. A mean-position template has frames == 1.
struct Template {
  TeamScope team = TeamScope::offense;
  int slots = 0;
  int frames = 0;
  std::vector<double> positions;

  Vec2 position(int slot, int frame) const {
    const double* p = positions.data() + (slot * frames + frame) * 2;
    return {p[0], p[1]};
  }
  std::span<const double> slot_trajectory(int slot) const {
    return {positions.data() + slot * frames * 2,
            static_cast<std::size_t>(frames) * 2};
  }
  friend bool operator==(const Template&, const Template&) = default;
};

struct Violation {
  std::string message;
};

std::vector<Violation> validate_play(const Play& play,
                                     const RosterConfig& config);

std::vector<double> flatten(const Play& play, const AgentSubset& scope);
std::size_t flattened_size(const Play& play, const AgentSubset& scope);
// Writes into `out`, which must have flattened_size() elements.
void flatten_into(const Play& play, const AgentSubset& scope,
                  std::span<double> out);

}  // namespace playalign
