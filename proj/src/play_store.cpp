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

#include "playalign/play_store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "playalign/errors.hpp"
#include "playalign/ingest.hpp"

namespace playalign {

void PlayStore::add(Play play) {
  if (by_id_.contains(play.play_id)) {
    throw InvalidArgument("duplicate play id " + play.play_id);
  }
  by_id_.emplace(play.play_id, plays_.size());
  plays_.push_back(std::move(play));
}

void PlayStore::add_all(std::vector<Play> plays) {
  plays_.reserve(plays_.size() + plays.size());
  for (Play& p : plays) add(std::move(p));
}

const Play* PlayStore::find(std::string_view play_id) const {
  const auto it = by_id_.find(std::string(play_id));
  return it == by_id_.end() ? nullptr : &plays_[it->second];
}

const Play& PlayStore::at(std::string_view play_id) const {
  const Play* p = find(play_id);
  if (p == nullptr) throw NotFound("unknown play id " + std::string(play_id));
  return *p;
}

std::vector<int> PlayStore::window_lengths() const {
  std::set<int> lengths;
  for (const Play& p : plays_) lengths.insert(p.window_seconds);
  return {lengths.begin(), lengths.end()};
}

std::vector<Play> PlayStore::with_window(int window_seconds) const {
  std::vector<Play> out;
  for (const Play& p : plays_) {
    if (p.window_seconds == window_seconds) out.push_back(p);
  }
  return out;
}

void PlayStore::write(std::ostream& out) const {
  out << "# playalign play store v1\n";
  for (const Play& p : plays_) {
    out << "# play " << p.play_id << " game " << p.game_id << " window "
        << p.window_seconds << " rate " << format_double(p.sample_rate)
        << " start " << format_double(p.start_time) << " split "
        << p.team_split.offense.begin << ' ' << p.team_split.offense.count
        << ' ' << p.team_split.defense.begin << ' '
        << p.team_split.defense.count << " frames " << p.frame_count()
        << " actions " << (p.actions.empty() ? 0 : 1) << " ids "
        << (p.team_ids.empty() ? 0 : 1) << '\n';
    write_play_rows(out, p);
  }
}

namespace {

double to_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ParseError("malformed number '" + std::string(s) + "'", line);
  }
  return v;
}

int to_int(std::string_view s, std::size_t line) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ParseError("malformed integer '" + std::string(s) + "'", line);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = text.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, at - start));
    start = at + 1;
  }
}

}  // namespace

PlayStore PlayStore::read(std::istream& in) {
  PlayStore store;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    if (raw.rfind("# play ", 0) != 0) {
      if (raw.front() == '#') continue;
      throw ParseError("tracking row outside a play block", line);
    }
    std::istringstream header(raw.substr(2));
    std::string key;
    Play play;
    std::size_t frames = 0;
    int has_actions = 0;
    int has_ids = 0;
    std::string rate, start;
    header >> key >> play.play_id >> key >> play.game_id >> key >>
        play.window_seconds >> key >> rate >> key >> start >> key >>
        play.team_split.offense.begin >> play.team_split.offense.count >>
        play.team_split.defense.begin >> play.team_split.defense.count >> key >>
        frames >> key >> has_actions >> key >> has_ids;
    if (!header) throw ParseError("malformed play header", line);
    play.sample_rate = to_double(rate, line);
    play.start_time = to_double(start, line);
    const int n = play.agent_count();
    play.coords.assign(frames * play.stride(), 0.0);
    play.team_ids.assign(n, 0);
    play.player_ids.assign(n, 0);
    if (has_actions) play.actions.assign(frames * (n + 1), 0);
    for (std::size_t f = 0; f < frames; ++f) {
      double* row = play.coords.data() + f * play.stride();
      for (int a = 0; a <= n; ++a) {
        if (!std::getline(in, raw)) {
          throw ParseError("truncated play " + play.play_id, line);
        }
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const auto fields = split(raw, ',');
        if (fields.size() != 7) {
          throw ParseError("expected 7 fields, found " +
                               std::to_string(fields.size()),
                           line);
        }
        const int team = to_int(fields[1], line);
        const int player = to_int(fields[2], line);
        const int action = to_int(fields[3], line);
        if (a < n) {
          row[2 * a] = to_double(fields[4], line);
          row[2 * a + 1] = to_double(fields[5], line);
          if (f == 0) {
            play.team_ids[a] = team;
            play.player_ids[a] = player;
          }
        } else {
          if (team != kBallTeamId) {
            throw ParseError("expected the ball row", line);
          }
          row[2 * a] = to_double(fields[4], line);
          row[2 * a + 1] = to_double(fields[5], line);
          row[2 * a + 2] = to_double(fields[6], line);
        }
        if (has_actions) play.actions[f * (n + 1) + a] = action;
      }
    }
    if (!has_ids) {
      play.team_ids.clear();
      play.player_ids.clear();
    }
    store.add(std::move(play));
  }
  return store;
}

void PlayStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write play store " + path.string());
  write(out);
  if (!out) throw Error("failed writing play store " + path.string());
}

PlayStore PlayStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open play store " + path.string());
  return read(in);
}

}  // namespace playalign
