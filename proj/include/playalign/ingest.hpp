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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "playalign/model.hpp"

namespace playalign {

// Time-ordered frames of one game. Agents within a frame are sorted by
// (team id, player id).
struct GameStream {
  std::string game_id;
  std::vector<Frame> frames;
};

bool operator==(const Frame& a, const Frame& b);

inline constexpr int kBallTeamId = -1;
inline constexpr int kBallPlayerId = -1;

// Tracking rows: `time_s, team_id, player_id, action_id, x_ft, y_ft, z_ft`.
// Blank lines, '#' comments and a leading header row are skipped.
GameStream parse_tracking(std::istream& in, std::string game_id,
                          const RosterConfig& roster = {});
GameStream parse_tracking_file(const std::filesystem::path& path,
                               const RosterConfig& roster = {});

void write_tracking(std::ostream& out, const GameStream& game);
void write_tracking_header(std::ostream& out);
// Rows of one play in its own agent order.
void write_play_rows(std::ostream& out, const Play& play);

std::string make_play_id(std::string_view game_id, int window_seconds,
                         std::size_t start_frame);

struct OffenseRule {
  // Team id to treat as offense; unset = the team of the player nearest the
  // ball at the window midpoint.
  std::optional<int> offense_team;
};

// Sliding windows of each requested length over every continuous chunk of
// the stream. A chunk ends at a cadence break longer than 1.5 frame
// intervals or a change of on-court identities.
std::vector<Play> extract_windows(const GameStream& game,
                                  std::span<const int> window_seconds,
                                  double stride_seconds,
                                  const RosterConfig& roster = {},
                                  const OffenseRule& rule = {});

// Rotates the court half a turn when the offense sits in the x < 47 half,
// so every play attacks the basket at x = 94.
bool normalize_court(Play& play);

// Game files listed one per line, relative to the manifest's directory.
std::vector<std::filesystem::path> read_manifest(
    const std::filesystem::path& manifest);
void write_manifest(const std::filesystem::path& manifest,
                    std::span<const std::filesystem::path> games);

std::string format_double(double value);

}  // namespace playalign
