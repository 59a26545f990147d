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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "playalign/model.hpp"

namespace playalign {

// Append-only collection of raw plays keyed by play id. Plays keep the agent
// order they were ingested with; alignments live in the index.
class PlayStore {
 public:
  PlayStore() = default;

  // Throws InvalidArgument when the id is already present.
  void add(Play play);
  void add_all(std::vector<Play> plays);

  const Play* find(std::string_view play_id) const;
  const Play& at(std::string_view play_id) const;  // NotFound if missing
  std::span<const Play> plays() const { return plays_; }
  std::size_t size() const { return plays_.size(); }
  bool empty() const { return plays_.empty(); }

  std::vector<int> window_lengths() const;
  std::vector<Play> with_window(int window_seconds) const;

  // Text format: a '# play ...' header per play followed by its tracking
  // rows, agents in play order and then the ball.
  void write(std::ostream& out) const;
  static PlayStore read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static PlayStore load(const std::filesystem::path& path);

 private:
  std::vector<Play> plays_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace playalign
