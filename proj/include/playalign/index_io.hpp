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

#include "playalign/retrieval.hpp"

namespace playalign {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

// Versioned little-endian binary holding trees, bucket entries and the
// baseline clustering. Plays are not included; attach a PlayStore after
// loading.
void write_index(std::ostream& out, const PlayIndex& index);
PlayIndex read_index(std::istream& in);

void save_index(const std::filesystem::path& path, const PlayIndex& index);
PlayIndex load_index(const std::filesystem::path& path);

}  // namespace playalign
