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

#include "playalign/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "playalign/errors.hpp"

namespace playalign {

bool operator==(const Frame& a, const Frame& b) {
  return a.timestamp == b.timestamp && a.agents == b.agents &&
         a.ball == b.ball && a.team_ids == b.team_ids &&
         a.player_ids == b.player_ids && a.actions == b.actions &&
         a.ball_action == b.ball_action;
}

std::string format_double(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  T value{};
  const auto r = std::from_chars(field.data(), field.data() + field.size(),
                                 value);
  if (r.ec != std::errc() || r.ptr != field.data() + field.size()) {
    throw ParseError("malformed number '" + std::string(field) + "'", line);
  }
  return value;
}

struct Row {
  int team;
  int player;
  int action;
  double x, y, z;
  std::size_t line;
};

std::string time_text(double t) { return format_double(t); }

Frame assemble_frame(double t, std::vector<Row>& rows,
                     const RosterConfig& roster) {
  const std::size_t line = rows.front().line;
  Frame f;
  f.timestamp = t;
  int balls = 0;
  std::set<std::pair<int, int>> seen;
  std::map<int, int> per_team;
  std::vector<const Row*> agents;
  for (const Row& r : rows) {
    const bool ball_team = r.team == kBallTeamId;
    const bool ball_player = r.player == kBallPlayerId;
    if (ball_team != ball_player) {
      throw ParseError("team/player id -1 is reserved for the ball", r.line);
    }
    if (!seen.insert({r.team, r.player}).second) {
      throw ParseError("duplicate agent sample (team " +
                           std::to_string(r.team) + ", player " +
                           std::to_string(r.player) + ") at t=" + time_text(t),
                       r.line);
    }
    if (ball_team) {
      ++balls;
      f.ball = {r.x, r.y, r.z};
      f.ball_action = r.action;
    } else {
      ++per_team[r.team];
      agents.push_back(&r);
    }
  }
  if (balls == 0) {
    throw ParseError("missing ball row at t=" + time_text(t), line);
  }
  if (static_cast<int>(per_team.size()) != roster.team_count) {
    throw ParseError("missing agents at t=" + time_text(t) + ": found " +
                         std::to_string(per_team.size()) + " teams, expected " +
                         std::to_string(roster.team_count),
                     line);
  }
  for (const auto& [team, count] : per_team) {
    if (count != roster.agents_per_team) {
      throw ParseError("missing agents at t=" + time_text(t) + ": team " +
                           std::to_string(team) + " has " +
                           std::to_string(count) + " of " +
                           std::to_string(roster.agents_per_team),
                       line);
    }
  }
  std::sort(agents.begin(), agents.end(), [](const Row* a, const Row* b) {
    return std::tie(a->team, a->player) < std::tie(b->team, b->player);
  });
  for (const Row* r : agents) {
    f.agents.push_back({r->x, r->y});
    f.team_ids.push_back(r->team);
    f.player_ids.push_back(r->player);
    f.actions.push_back(r->action);
  }
  if (std::all_of(f.actions.begin(), f.actions.end(),
                  [](int a) { return a == 0; }) &&
      f.ball_action == 0) {
    f.actions.clear();
  }
  return f;
}

}  // namespace

GameStream parse_tracking(std::istream& in, std::string game_id,
                          const RosterConfig& roster) {
  GameStream game;
  game.game_id = std::move(game_id);
  const double interval = 1.0 / roster.sample_rate;
  std::vector<Row> pending;
  double pending_t = 0.0;
  std::string raw;
  std::size_t line = 0;
  bool seen_data = false;

  auto flush = [&]() {
    if (pending.empty()) return;
    Frame f = assemble_frame(pending_t, pending, roster);
    if (!game.frames.empty()) {
      const double dt = f.timestamp - game.frames.back().timestamp;
      if (dt < 0.5 * interval) {
        throw ParseError("cadence violation at t=" + time_text(f.timestamp) +
                             ": frames " + format_double(dt) + " s apart",
                         pending.front().line);
      }
    }
    game.frames.push_back(std::move(f));
    pending.clear();
  };

  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    if (!seen_data && text.rfind("time", 0) == 0) {
      seen_data = true;
      continue;
    }
    seen_data = true;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      fields.push_back(text.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) {
      throw ParseError("expected 7 fields, found " +
                           std::to_string(fields.size()),
                       line);
    }
    Row row{parse_number<int>(fields[1], line),
            parse_number<int>(fields[2], line),
            parse_number<int>(fields[3], line),
            parse_number<double>(fields[4], line),
            parse_number<double>(fields[5], line),
            parse_number<double>(fields[6], line),
            line};
    const double t = parse_number<double>(fields[0], line);
    if (!std::isfinite(t) || !std::isfinite(row.x) || !std::isfinite(row.y) ||
        !std::isfinite(row.z)) {
      throw ParseError("non-finite value", line);
    }
    if (!pending.empty() && t != pending_t) {
      if (t < pending_t) {
        throw ParseError("non-monotone timestamp " + time_text(t) +
                             " after " + time_text(pending_t),
                         line);
      }
      flush();
    }
    if (pending.empty() && !game.frames.empty() &&
        t <= game.frames.back().timestamp) {
      throw ParseError("non-monotone timestamp " + time_text(t) + " after " +
                           time_text(game.frames.back().timestamp),
                       line);
    }
    pending_t = t;
    pending.push_back(row);
  }
  flush();
  return game;
}

GameStream parse_tracking_file(const std::filesystem::path& path,
                               const RosterConfig& roster) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open tracking file " + path.string());
  try {
    return parse_tracking(in, path.stem().string(), roster);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void write_tracking_header(std::ostream& out) {
  out << "time_s,team_id,player_id,action_id,x_ft,y_ft,z_ft\n";
}

namespace {

void write_row(std::ostream& out, double t, int team, int player, int action,
               double x, double y, double z) {
  out << format_double(t) << ',' << team << ',' << player << ',' << action
      << ',' << format_double(x) << ',' << format_double(y) << ','
      << format_double(z) << '\n';
}

}  // namespace

void write_tracking(std::ostream& out, const GameStream& game) {
  write_tracking_header(out);
  for (const Frame& f : game.frames) {
    for (std::size_t a = 0; a < f.agents.size(); ++a) {
      write_row(out, f.timestamp, f.team_ids.at(a), f.player_ids.at(a),
                f.actions.empty() ? 0 : f.actions[a], f.agents[a].x,
                f.agents[a].y, 0.0);
    }
    write_row(out, f.timestamp, kBallTeamId, kBallPlayerId, f.ball_action,
              f.ball.x, f.ball.y, f.ball.z);
  }
}

void write_play_rows(std::ostream& out, const Play& play) {
  const int n = play.agent_count();
  for (std::size_t f = 0; f < play.frame_count(); ++f) {
    const double t = play.timestamp(f);
    const int* actions =
        play.actions.empty() ? nullptr : play.actions.data() + f * (n + 1);
    for (int a = 0; a < n; ++a) {
      int team = play.team_split.offense.begin <= a &&
                         a < play.team_split.offense.begin +
                                 play.team_split.offense.count
                     ? 1
                     : 2;
      int player = a + 1;
      if (!play.team_ids.empty()) team = play.team_ids[a];
      if (!play.player_ids.empty()) player = play.player_ids[a];
      const Vec2 p = play.agent(f, a);
      write_row(out, t, team, player, actions ? actions[a] : 0, p.x, p.y, 0.0);
    }
    const Vec3 b = play.ball(f);
    write_row(out, t, kBallTeamId, kBallPlayerId, actions ? actions[n] : 0,
              b.x, b.y, b.z);
  }
}

std::string make_play_id(std::string_view game_id, int window_seconds,
                         std::size_t start_frame) {
  return std::string(game_id) + ":" + std::to_string(window_seconds) + "s:" +
         std::to_string(start_frame);
}

bool normalize_court(Play& play) {
  const AgentRange& off = play.team_split.offense;
  if (off.count == 0 || play.frame_count() == 0) return false;
  double sum_x = 0.0;
  for (std::size_t f = 0; f < play.frame_count(); ++f) {
    for (int a = 0; a < off.count; ++a) sum_x += play.agent(f, off.begin + a).x;
  }
  const double mean_x =
      sum_x / static_cast<double>(play.frame_count() * off.count);
  if (mean_x >= kCourtLength / 2) return false;
  const int n = play.agent_count();
  const std::size_t stride = play.stride();
  for (std::size_t f = 0; f < play.frame_count(); ++f) {
    double* row = play.coords.data() + f * stride;
    for (int a = 0; a <= n; ++a) {  // a == n is the ball
      row[2 * a] = kCourtLength - row[2 * a];
      row[2 * a + 1] = kCourtWidth - row[2 * a + 1];
    }
  }
  return true;
}

std::vector<Play> extract_windows(const GameStream& game,
                                  std::span<const int> window_seconds,
                                  double stride_seconds,
                                  const RosterConfig& roster,
                                  const OffenseRule& rule) {
  if (!(stride_seconds > 0.0)) {
    throw InvalidArgument("window stride must be positive");
  }
  const double interval = 1.0 / roster.sample_rate;
  const auto stride_frames = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(stride_seconds * roster.sample_rate)));

  // Continuous chunks [begin, end).
  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  const auto& frames = game.frames;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= frames.size(); ++i) {
    const bool split =
        i == frames.size() ||
        frames[i].timestamp - frames[i - 1].timestamp > 1.5 * interval ||
        frames[i].team_ids != frames[i - 1].team_ids ||
        frames[i].player_ids != frames[i - 1].player_ids;
    if (split) {
      if (i > begin) chunks.emplace_back(begin, i);
      begin = i;
    }
  }

  const int per_team = roster.agents_per_team;
  std::vector<Play> out;
  for (int w : window_seconds) {
    if (w < 1 || w > 5) {
      throw InvalidArgument("window length must be 1..5 s, got " +
                            std::to_string(w));
    }
    const auto len =
        static_cast<std::size_t>(std::llround(w * roster.sample_rate));
    for (const auto& [c0, c1] : chunks) {
      for (std::size_t s = c0; s + len <= c1; s += stride_frames) {
        const Frame& mid = frames[s + len / 2];
        int offense_team = 0;
        if (rule.offense_team) {
          offense_team = *rule.offense_team;
        } else {
          double best = std::numeric_limits<double>::infinity();
          for (std::size_t a = 0; a < mid.agents.size(); ++a) {
            const double dx = mid.agents[a].x - mid.ball.x;
            const double dy = mid.agents[a].y - mid.ball.y;
            const double d = dx * dx + dy * dy;
            if (d < best) {
              best = d;
              offense_team = mid.team_ids[a];
            }
          }
        }
        // Offense agents first, each team in player id order.
        std::vector<int> order;
        for (int pass = 0; pass < 2; ++pass) {
          for (std::size_t a = 0; a < mid.agents.size(); ++a) {
            if ((mid.team_ids[a] == offense_team) == (pass == 0)) {
              order.push_back(static_cast<int>(a));
            }
          }
        }
        if (static_cast<int>(order.size()) != 2 * per_team ||
            std::count(mid.team_ids.begin(), mid.team_ids.end(),
                       offense_team) != per_team) {
          throw InvalidArgument("offense team " + std::to_string(offense_team) +
                                " not on court in game " + game.game_id);
        }
        std::vector<Frame> window;
        window.reserve(len);
        for (std::size_t f = s; f < s + len; ++f) {
          const Frame& src = frames[f];
          Frame dst;
          dst.timestamp = src.timestamp;
          dst.ball = src.ball;
          dst.ball_action = src.ball_action;
          for (int a : order) {
            dst.agents.push_back(src.agents[a]);
            dst.team_ids.push_back(src.team_ids[a]);
            dst.player_ids.push_back(src.player_ids[a]);
            if (!src.actions.empty()) dst.actions.push_back(src.actions[a]);
          }
          window.push_back(std::move(dst));
        }
        Play play = Play::from_frames(make_play_id(game.game_id, w, s),
                                      game.game_id, w, roster.sample_rate,
                                      TeamSplit::standard(per_team), window);
        normalize_court(play);
        out.push_back(std::move(play));
      }
    }
  }
  return out;
}

std::vector<std::filesystem::path> read_manifest(
    const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw NotFound("cannot open manifest " + manifest.string());
  std::vector<std::filesystem::path> out;
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::filesystem::path p(line);
    if (p.is_relative()) p = manifest.parent_path() / p;
    out.push_back(p);
  }
  return out;
}

void write_manifest(const std::filesystem::path& manifest,
                    std::span<const std::filesystem::path> games) {
  std::ofstream out(manifest);
  if (!out) throw Error("cannot write manifest " + manifest.string());
  for (const auto& g : games) out << g.generic_string() << '\n';
}

}  // namespace playalign
