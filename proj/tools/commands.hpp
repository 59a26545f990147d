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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "playalign/model.hpp"

namespace playalign::cli {

// Runs the command line `args` (without the program name). Returns the
// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// "all", "players", or tokens such as "o0,o3,d1,ball".
AgentSubset parse_selection(std::string_view text, int agents_per_team);

}  // namespace playalign::cli
