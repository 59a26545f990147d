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

#include <json.hpp>

#include "playalign/retrieval.hpp"

namespace playalign {

using Json = nlohmann::json;

// {"play_id", "game_id", "start_time", "window_seconds", "sample_rate",
//  "offense": [[[x, y], ...] per agent], "defense": [...],
//  "ball": [[x, y, z], ...], "team_ids", "player_ids"}
Json play_to_json(const Play& play);

// Accepts the layout above. An agent given as null is missing and becomes a
// NaN trajectory. window_seconds defaults to frames / sample_rate.
Play play_from_json(const Json& j, int agents_per_team = 5);

// Query request body:
// {"play": {...}, "selected": {"offense": [..], "defense": [..], "ball": b},
//  "k": 10, "method": "tree", "probe_leaves": 1,
//  "boosts": {"plays": {id: x}, "games": {id: x}}}
Query query_from_json(const Json& j, int default_k = 10,
                      Method default_method = Method::tree);
Json query_to_json(const Query& query);

// Results with each candidate's trajectories in the query's agent order.
Json result_to_json(const QueryResult& result, const PlayStore& store);

Json stats_to_json(const std::vector<WindowStats>& stats);

}  // namespace playalign
