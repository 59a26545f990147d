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

#include "playalign/wire.hpp"

#include <cmath>
#include <limits>

#include "playalign/errors.hpp"

namespace playalign {

Json play_to_json(const Play& play) {
  Json j;
  j["play_id"] = play.play_id;
  j["game_id"] = play.game_id;
  j["start_time"] = play.start_time;
  j["window_seconds"] = play.window_seconds;
  j["sample_rate"] = play.sample_rate;
  for (TeamScope team : {TeamScope::offense, TeamScope::defense}) {
    const AgentRange& r = play.team_split.range(team);
    Json agents = Json::array();
    for (int a = 0; a < r.count; ++a) {
      Json traj = Json::array();
      bool missing = false;
      for (std::size_t f = 0; f < play.frame_count(); ++f) {
        const Vec2 p = play.agent(f, r.begin + a);
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) missing = true;
        traj.push_back({p.x, p.y});
      }
      agents.push_back(missing ? Json(nullptr) : std::move(traj));
    }
    j[to_string(team)] = std::move(agents);
  }
  Json ball = Json::array();
  for (std::size_t f = 0; f < play.frame_count(); ++f) {
    const Vec3 b = play.ball(f);
    ball.push_back({b.x, b.y, b.z});
  }
  j["ball"] = std::move(ball);
  if (!play.team_ids.empty()) j["team_ids"] = play.team_ids;
  if (!play.player_ids.empty()) j["player_ids"] = play.player_ids;
  return j;
}

namespace {

double number(const Json& j, const char* what) {
  if (!j.is_number()) {
    throw InvalidArgument(std::string(what) + " must be a number");
  }
  return j.get<double>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::uint32_t agent_mask(const Json& j, int agents_per_team, const char* team) {
  if (!j.is_array()) {
    throw InvalidArgument(std::string("selected.") + team + " must be a list");
  }
  std::uint32_t mask = 0;
  for (const Json& v : j) {
    if (!v.is_number_integer()) {
      throw InvalidArgument(std::string("selected.") + team +
                            " entries must be integers");
    }
    const int a = v.get<int>();
    if (a < 0 || a >= agents_per_team) {
      throw InvalidArgument(std::string("selected ") + team + " agent " +
                            std::to_string(a) + " out of range");
    }
    mask |= 1u << a;
  }
  return mask;
}

}  // namespace

Play play_from_json(const Json& j, int agents_per_team) {
  if (!j.is_object()) throw InvalidArgument("play must be an object");
  const Json& ball = field(j, "ball");
  if (!ball.is_array() || ball.empty()) {
    throw InvalidArgument("play.ball must be a non-empty list of [x, y, z]");
  }
  const std::size_t frames = ball.size();
  Play play;
  play.play_id = j.value("play_id", std::string("query"));
  play.game_id = j.value("game_id", std::string());
  play.start_time = j.contains("start_time")
                        ? number(j.at("start_time"), "start_time")
                        : 0.0;
  play.sample_rate = j.contains("sample_rate")
                         ? number(j.at("sample_rate"), "sample_rate")
                         : 25.0;
  if (!(play.sample_rate > 0.0)) {
    throw InvalidArgument("sample_rate must be positive");
  }
  if (j.contains("window_seconds")) {
    play.window_seconds = j.at("window_seconds").get<int>();
  } else {
    const double w = static_cast<double>(frames) / play.sample_rate;
    play.window_seconds = static_cast<int>(std::lround(w));
    if (std::abs(w - play.window_seconds) > 1e-9) {
      throw InvalidArgument("frame count is not a whole number of seconds");
    }
  }
  play.team_split = TeamSplit::standard(agents_per_team);
  play.coords.assign(frames * play.stride(),
                     std::numeric_limits<double>::quiet_NaN());
  const std::size_t stride = play.stride();
  for (TeamScope team : {TeamScope::offense, TeamScope::defense}) {
    const Json& agents = field(j, to_string(team));
    const AgentRange& r = play.team_split.range(team);
    if (!agents.is_array() || static_cast<int>(agents.size()) != r.count) {
      throw DimensionError(std::string("play.") + to_string(team) + " needs " +
                           std::to_string(r.count) + " agents");
    }
    for (int a = 0; a < r.count; ++a) {
      const Json& traj = agents[a];
      if (traj.is_null()) continue;
      if (!traj.is_array() || traj.size() != frames) {
        throw DimensionError(std::string(to_string(team)) + " agent " +
                             std::to_string(a) + " needs " +
                             std::to_string(frames) + " samples");
      }
      for (std::size_t f = 0; f < frames; ++f) {
        const Json& p = traj[f];
        if (!p.is_array() || p.size() != 2) {
          throw InvalidArgument("agent samples must be [x, y]");
        }
        double* out = play.coords.data() + f * stride + 2 * (r.begin + a);
        out[0] = number(p[0], "x");
        out[1] = number(p[1], "y");
      }
    }
  }
  const int n = play.agent_count();
  for (std::size_t f = 0; f < frames; ++f) {
    const Json& b = ball[f];
    if (!b.is_array() || b.size() != 3) {
      throw InvalidArgument("ball samples must be [x, y, z]");
    }
    double* out = play.coords.data() + f * stride + 2 * n;
    out[0] = number(b[0], "ball x");
    out[1] = number(b[1], "ball y");
    out[2] = number(b[2], "ball z");
  }
  if (j.contains("team_ids")) play.team_ids = j.at("team_ids").get<std::vector<int>>();
  if (j.contains("player_ids")) {
    play.player_ids = j.at("player_ids").get<std::vector<int>>();
  }
  if ((!play.team_ids.empty() && static_cast<int>(play.team_ids.size()) != n) ||
      (!play.player_ids.empty() && static_cast<int>(play.player_ids.size()) != n)) {
    throw DimensionError("team_ids/player_ids need one entry per agent");
  }
  return play;
}

Query query_from_json(const Json& j, int default_k, Method default_method) {
  if (!j.is_object()) throw InvalidArgument("request body must be an object");
  Query q;
  q.play = play_from_json(field(j, "play"));
  const int m = q.play.agents_per_team();
  if (j.contains("selected")) {
    const Json& s = j.at("selected");
    if (!s.is_object()) throw InvalidArgument("selected must be an object");
    q.selected.offense = s.contains("offense")
                             ? agent_mask(s.at("offense"), m, "offense")
                             : 0;
    q.selected.defense = s.contains("defense")
                             ? agent_mask(s.at("defense"), m, "defense")
                             : 0;
    q.selected.ball = s.value("ball", false);
  } else {
    q.selected = AgentSubset::all(m);
  }
  q.k = j.contains("k") ? j.at("k").get<int>() : default_k;
  q.method = j.contains("method")
                 ? parse_method(j.at("method").get<std::string>())
                 : default_method;
  q.probe_leaves = j.value("probe_leaves", 1);
  if (j.contains("boosts")) {
    const Json& b = j.at("boosts");
    if (b.contains("plays")) {
      for (const auto& [id, v] : b.at("plays").items()) {
        q.play_boosts[id] = number(v, "boost");
      }
    }
    if (b.contains("games")) {
      for (const auto& [id, v] : b.at("games").items()) {
        q.game_boosts[id] = number(v, "boost");
      }
    }
  }
  return q;
}

Json query_to_json(const Query& query) {
  Json j;
  j["play"] = play_to_json(query.play);
  Json off = Json::array(), def = Json::array();
  for (int a = 0; a < 32; ++a) {
    if ((query.selected.offense >> a) & 1u) off.push_back(a);
    if ((query.selected.defense >> a) & 1u) def.push_back(a);
  }
  j["selected"] = {{"offense", off}, {"defense", def},
                   {"ball", query.selected.ball}};
  j["k"] = query.k;
  j["method"] = to_string(query.method);
  j["probe_leaves"] = query.probe_leaves;
  if (!query.play_boosts.empty() || !query.game_boosts.empty()) {
    Json plays = Json::object(), games = Json::object();
    for (const auto& [id, v] : query.play_boosts) plays[id] = v;
    for (const auto& [id, v] : query.game_boosts) games[id] = v;
    j["boosts"] = {{"plays", plays}, {"games", games}};
  }
  return j;
}

Json result_to_json(const QueryResult& result, const PlayStore& store) {
  Json j;
  j["window_seconds"] = result.window_seconds;
  j["leaf"] = result.leaf;
  j["candidates"] = result.candidates;
  j["imputed"] = {{"offense", result.imputed_offense},
                  {"defense", result.imputed_defense}};
  Json items = Json::array();
  for (const RankedResult& r : result.results) {
    Json item;
    item["rank"] = r.rank;
    item["play_id"] = r.play_id;
    item["game_id"] = r.game_id;
    item["distance"] = r.distance;
    item["score"] = r.score;
    item["bucket"] = r.bucket;
    item["correspondence"] = {
        {"offense", std::vector<int>(r.offense.mapping().begin(),
                                     r.offense.mapping().end())},
        {"defense", std::vector<int>(r.defense.mapping().begin(),
                                     r.defense.mapping().end())}};
    item["play"] = play_to_json(in_query_order(store.at(r.play_id), r));
    items.push_back(std::move(item));
  }
  j["results"] = std::move(items);
  return j;
}

Json stats_to_json(const std::vector<WindowStats>& stats) {
  Json windows = Json::array();
  std::size_t plays = 0;
  for (const WindowStats& s : stats) {
    plays += s.plays;
    windows.push_back({{"window_seconds", s.window_seconds},
                       {"plays", s.plays},
                       {"nodes", s.nodes},
                       {"leaves", s.leaves},
                       {"depth", s.depth},
                       {"max_leaf_size", s.max_leaf_size},
                       {"largest_leaf", s.largest_leaf},
                       {"leaf_sizes", s.leaf_sizes},
                       {"layer_costs", s.layer_costs},
                       {"baseline_clusters", s.baseline_clusters}});
  }
  return {{"plays", plays}, {"windows", windows}};
}

}  // namespace playalign
