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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "playalign/ingest.hpp"
#include "playalign/model.hpp"

namespace playalign {

// Plays drawn from a few formation templates. Each formation fixes role
// anchors, role motion, defender placement and one pass; each play adds a
// rigid shift, smooth per-role deviation and per-frame noise, then shuffles
// the agent order inside each team.
struct SyntheticConfig {
  int formations = 4;
  int plays_per_formation = 100;
  double noise = 0.5;             // per-frame Gaussian noise, feet
  double motion_amplitude = 3.0;  // smooth per-play role deviation, feet
  double formation_shift = 2.0;   // radius of the per-play rigid shift, feet
  int window_seconds = 4;
  double sample_rate = 25.0;
  int agents_per_team = 5;
  // Near-duplicates: extra copies of each play with their own smooth role
  // deviation and noise, used as relevance groups for retrieval checks.
  int duplicates_per_play = 0;
  double duplicate_motion = 1.5;  // feet
  double duplicate_noise = 0.3;   // feet
  int plays_per_game = 50;
  bool shuffle_agents = true;
  std::uint64_t seed = 1;
};

struct SyntheticLabel {
  std::string play_id;
  int formation = 0;
  // Applying these maps to the play puts every agent in its role slot.
  PermutationMap offense;
  PermutationMap defense;
  std::string source_play;  // the original play of a near-duplicate group
};

struct SyntheticCorpus {
  std::vector<Play> plays;
  std::vector<SyntheticLabel> labels;  // parallel to plays
};

SyntheticCorpus generate_synthetic(const SyntheticConfig& config);

// Game streams holding the corpus with a two second gap between plays, so
// window extraction with the same length recovers each play.
std::vector<GameStream> to_game_streams(const SyntheticCorpus& corpus);

// Writes games/<game>.csv, manifest.txt, labels.csv and, when the corpus has
// near-duplicates, groups.csv under `dir`.
void write_synthetic(const SyntheticCorpus& corpus,
                     const std::filesystem::path& dir);

std::string format_permutation_pair(const PermutationMap& offense,
                                    const PermutationMap& defense);

}  // namespace playalign
