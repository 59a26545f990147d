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

#include "playalign/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "playalign/errors.hpp"
#include "playalign/util.hpp"

namespace playalign {

namespace {

constexpr double kBasketX = 88.75;
constexpr double kBasketY = 25.0;
constexpr int kGapFrames = 50;

struct Formation {
  std::vector<Vec2> anchor;
  std::vector<Vec2> drift;
  std::vector<double> bend;
  std::vector<double> guard_gap;
  std::vector<double> guard_side;
  int receiver = 1;
  double pass_at = 0.7;
};

Formation make_formation(Rng& rng, int m) {
  Formation f;
  double min_sep = 8.0;
  int attempts = 0;
  while (static_cast<int>(f.anchor.size()) < m) {
    const Vec2 p{rng.uniform(55.0, 88.0), rng.uniform(5.0, 45.0)};
    bool ok = true;
    for (const Vec2& q : f.anchor) {
      if (std::hypot(p.x - q.x, p.y - q.y) < min_sep) ok = false;
    }
    if (ok) {
      f.anchor.push_back(p);
    } else if (++attempts % 1000 == 0) {
      min_sep *= 0.8;
    }
  }
  for (int a = 0; a < m; ++a) {
    const double len = rng.uniform(4.0, 12.0);
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Vec2 end{std::clamp(f.anchor[a].x + len * std::cos(angle), 50.0, 92.0),
                   std::clamp(f.anchor[a].y + len * std::sin(angle), 3.0, 47.0)};
    f.drift.push_back({end.x - f.anchor[a].x, end.y - f.anchor[a].y});
    f.bend.push_back(rng.uniform(-4.0, 4.0));
    f.guard_gap.push_back(rng.uniform(3.5, 6.0));
    f.guard_side.push_back(rng.uniform(-2.0, 2.0));
  }
  f.receiver = m > 1 ? 1 + static_cast<int>(rng.index(m - 1)) : 0;
  f.pass_at = rng.uniform(0.62, 0.85);
  return f;
}

double bernstein(const double c[4], double u) {
  const double v = 1.0 - u;
  return c[0] * v * v * v + 3.0 * c[1] * u * v * v + 3.0 * c[2] * u * u * v +
         c[3] * u * u * u;
}

// Noise-free role trajectories, [frame][role] with offense roles first.
struct RolePlay {
  int frames = 0;
  int per_team = 0;
  std::vector<Vec2> pos;  // frames * 2 * per_team

  Vec2& at(int f, int role) { return pos[f * 2 * per_team + role]; }
  const Vec2& at(int f, int role) const { return pos[f * 2 * per_team + role]; }
};

RolePlay clean_play(const Formation& form, Rng& rng, const SyntheticConfig& cfg,
                    int frames) {
  const int m = cfg.agents_per_team;
  RolePlay rp{frames, m, std::vector<Vec2>(frames * 2 * m)};
  const double r = cfg.formation_shift * std::sqrt(rng.uniform());
  const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Vec2 shift{r * std::cos(th), r * std::sin(th)};
  std::vector<double> ctrl(2 * m * 8);
  for (int a = 0; a < 2 * m; ++a) {
    const double sigma =
        a < m ? cfg.motion_amplitude : 0.5 * cfg.motion_amplitude;
    for (int k = 0; k < 8; ++k) ctrl[a * 8 + k] = rng.normal(sigma);
  }
  for (int f = 0; f < frames; ++f) {
    const double u = frames > 1 ? static_cast<double>(f) / (frames - 1) : 0.0;
    const double smooth = u * u * (3.0 - 2.0 * u);
    for (int a = 0; a < m; ++a) {
      const Vec2 d = form.drift[a];
      const double len = std::hypot(d.x, d.y);
      const Vec2 perp = len > 0.0 ? Vec2{-d.y / len, d.x / len} : Vec2{0, 0};
      const double bend = form.bend[a] * std::sin(std::numbers::pi * u);
      rp.at(f, a) = {form.anchor[a].x + d.x * smooth + perp.x * bend +
                         shift.x + bernstein(&ctrl[a * 8], u),
                     form.anchor[a].y + d.y * smooth + perp.y * bend +
                         shift.y + bernstein(&ctrl[a * 8 + 4], u)};
    }
    for (int a = 0; a < m; ++a) {
      const Vec2 man = rp.at(f, a);
      const double dx = kBasketX - man.x;
      const double dy = kBasketY - man.y;
      const double len = std::max(1e-9, std::hypot(dx, dy));
      const Vec2 unit{dx / len, dy / len};
      const double g = form.guard_gap[a];
      const double s = form.guard_side[a];
      const double* c = &ctrl[(m + a) * 8];
      rp.at(f, m + a) = {man.x + unit.x * g - unit.y * s + bernstein(c, u),
                         man.y + unit.y * g + unit.x * s + bernstein(c + 4, u)};
    }
  }
  return rp;
}

// Smooth per-role deviation added to every frame.
void perturb(RolePlay& rp, Rng& rng, double sigma) {
  const int roles = 2 * rp.per_team;
  std::vector<double> ctrl(roles * 8);
  for (double& c : ctrl) c = rng.normal(sigma);
  for (int f = 0; f < rp.frames; ++f) {
    const double u =
        rp.frames > 1 ? static_cast<double>(f) / (rp.frames - 1) : 0.0;
    for (int a = 0; a < roles; ++a) {
      rp.at(f, a).x += bernstein(&ctrl[a * 8], u);
      rp.at(f, a).y += bernstein(&ctrl[a * 8 + 4], u);
    }
  }
}

PermutationMap random_perm(Rng& rng, int m, bool shuffle) {
  std::vector<int> v(m);
  for (int i = 0; i < m; ++i) v[i] = i;
  if (shuffle) rng.shuffle(v);
  return PermutationMap(std::move(v));
}

Play realize(const RolePlay& rp, const Formation& form, Rng& rng,
             const SyntheticConfig& cfg, double sigma, const PermutationMap& off,
             const PermutationMap& def) {
  const int m = rp.per_team;
  const int frames = rp.frames;
  Play play;
  play.window_seconds = cfg.window_seconds;
  play.sample_rate = cfg.sample_rate;
  play.team_split = TeamSplit::standard(m);
  play.coords.assign(static_cast<std::size_t>(frames) * play.stride(), 0.0);
  const double pass_start = form.pass_at - 0.075;
  const double pass_end = form.pass_at + 0.075;
  std::vector<Vec2> noisy(2 * m);
  auto clamp_court = [](Vec2 p) {
    return Vec2{std::clamp(p.x, 0.5, kCourtLength - 0.5),
                std::clamp(p.y, 0.5, kCourtWidth - 0.5)};
  };
  for (int f = 0; f < frames; ++f) {
    double* row = play.coords.data() + f * play.stride();
    for (int role = 0; role < 2 * m; ++role) {
      const Vec2 p = rp.at(f, role);
      noisy[role] = clamp_court({p.x + rng.normal(sigma), p.y + rng.normal(sigma)});
    }
    for (int s = 0; s < m; ++s) {
      const int oa = off[s];
      const int da = m + def[s];
      row[2 * oa] = noisy[s].x;
      row[2 * oa + 1] = noisy[s].y;
      row[2 * da] = noisy[m + s].x;
      row[2 * da + 1] = noisy[m + s].y;
    }
    const double u = frames > 1 ? static_cast<double>(f) / (frames - 1) : 0.0;
    const Vec2 h = noisy[0];
    const Vec2 r = noisy[form.receiver];
    double w = 0.0;
    if (u >= pass_end) {
      w = 1.0;
    } else if (u > pass_start) {
      w = (u - pass_start) / (pass_end - pass_start);
    }
    const Vec2 holder{h.x + (r.x - h.x) * w, h.y + (r.y - h.y) * w};
    const Vec2 ball = clamp_court({holder.x + 0.5 + rng.normal(0.1 * sigma),
                                   holder.y + rng.normal(0.1 * sigma)});
    const double arc = w > 0.0 && w < 1.0 ? 6.0 * std::sin(std::numbers::pi * w)
                                          : 0.0;
    row[2 * 2 * m] = ball.x;
    row[2 * 2 * m + 1] = ball.y;
    row[2 * 2 * m + 2] = std::max(0.0, 4.0 + arc + rng.normal(0.1 * sigma));
  }
  return play;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.formations < 1 || cfg.plays_per_formation < 1 ||
      cfg.agents_per_team < 1 || cfg.plays_per_game < 1 ||
      cfg.duplicates_per_play < 0) {
    throw InvalidArgument("synthetic generator: counts must be positive");
  }
  if (cfg.window_seconds < 1 || cfg.window_seconds > 5) {
    throw InvalidArgument("synthetic generator: window must be 1..5 s");
  }
  if (cfg.noise < 0.0 || cfg.motion_amplitude < 0.0 ||
      cfg.duplicate_noise < 0.0 || cfg.duplicate_motion < 0.0 || cfg.formation_shift < 0.0) {
    throw InvalidArgument("synthetic generator: amplitudes must be >= 0");
  }
  const int m = cfg.agents_per_team;
  const int frames =
      static_cast<int>(std::lround(cfg.window_seconds * cfg.sample_rate));

  std::vector<Formation> forms;
  for (int g = 0; g < cfg.formations; ++g) {
    Rng rng(derive_seed(cfg.seed, 0xf0, g));
    forms.push_back(make_formation(rng, m));
  }

  SyntheticCorpus corpus;
  const int bases = cfg.formations * cfg.plays_per_formation;
  const int group = 1 + cfg.duplicates_per_play;
  std::size_t slot = 0;
  for (int i = 0; i < bases; ++i) {
    const int g = i % cfg.formations;
    Rng rng(derive_seed(cfg.seed, 0xb0, i));
    const RolePlay rp = clean_play(forms[g], rng, cfg, frames);
    std::string source;
    for (int d = 0; d < group; ++d, ++slot) {
      const PermutationMap off = random_perm(rng, m, cfg.shuffle_agents);
      const PermutationMap def = random_perm(rng, m, cfg.shuffle_agents);
      Play play;
      if (d == 0) {
        play = realize(rp, forms[g], rng, cfg, cfg.noise, off, def);
      } else {
        RolePlay copy = rp;
        perturb(copy, rng, cfg.duplicate_motion);
        play = realize(copy, forms[g], rng, cfg, cfg.duplicate_noise, off, def);
      }

      const std::size_t game = slot / cfg.plays_per_game;
      const std::size_t pos = slot % cfg.plays_per_game;
      char gid[32];
      std::snprintf(gid, sizeof(gid), "g%04zu", game);
      play.game_id = gid;
      play.start_time = static_cast<double>(pos * (frames + kGapFrames)) /
                        cfg.sample_rate;
      play.play_id = make_play_id(play.game_id, cfg.window_seconds,
                                  pos * static_cast<std::size_t>(frames));
      // Alternate which team has the ball; player ids stay per team.
      const int offense_team = slot % 2 == 0 ? 1 : 2;
      const int defense_team = 3 - offense_team;
      for (int a = 0; a < m; ++a) {
        play.team_ids.push_back(offense_team);
        play.player_ids.push_back((offense_team - 1) * m + a + 1);
      }
      for (int a = 0; a < m; ++a) {
        play.team_ids.push_back(defense_team);
        play.player_ids.push_back((defense_team - 1) * m + a + 1);
      }
      if (d == 0) source = play.play_id;
      corpus.labels.push_back({play.play_id, g, off, def, source});
      corpus.plays.push_back(std::move(play));
    }
  }
  return corpus;
}

std::vector<GameStream> to_game_streams(const SyntheticCorpus& corpus) {
  std::vector<GameStream> games;
  for (const Play& p : corpus.plays) {
    if (games.empty() || games.back().game_id != p.game_id) {
      games.push_back({p.game_id, {}});
    }
    const int n = p.agent_count();
    std::vector<int> order(n);
    for (int a = 0; a < n; ++a) order[a] = a;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::tie(p.team_ids[a], p.player_ids[a]) <
             std::tie(p.team_ids[b], p.player_ids[b]);
    });
    for (std::size_t f = 0; f < p.frame_count(); ++f) {
      Frame fr;
      fr.timestamp = p.timestamp(f);
      fr.ball = p.ball(f);
      for (int a : order) {
        fr.agents.push_back(p.agent(f, a));
        fr.team_ids.push_back(p.team_ids[a]);
        fr.player_ids.push_back(p.player_ids[a]);
      }
      games.back().frames.push_back(std::move(fr));
    }
  }
  return games;
}

std::string format_permutation_pair(const PermutationMap& offense,
                                    const PermutationMap& defense) {
  std::string out;
  for (int i = 0; i < offense.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(offense[i]);
  }
  out += '|';
  for (int i = 0; i < defense.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(defense[i]);
  }
  return out;
}

void write_synthetic(const SyntheticCorpus& corpus,
                     const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "games");
  std::vector<fs::path> entries;
  for (const GameStream& g : to_game_streams(corpus)) {
    const fs::path rel = fs::path("games") / (g.game_id + ".csv");
    std::ofstream out(dir / rel);
    if (!out) throw Error("cannot write " + (dir / rel).string());
    write_tracking(out, g);
    entries.push_back(rel);
  }
  write_manifest(dir / "manifest.txt", entries);

  std::ofstream labels(dir / "labels.csv");
  labels << "play_id,formation_label,true_permutation\n";
  bool duplicates = false;
  for (const SyntheticLabel& l : corpus.labels) {
    labels << l.play_id << ',' << l.formation << ','
           << format_permutation_pair(l.offense, l.defense) << '\n';
    if (l.source_play != l.play_id) duplicates = true;
  }
  if (duplicates) {
    std::ofstream groups(dir / "groups.csv");
    groups << "play_id,source_play\n";
    for (const SyntheticLabel& l : corpus.labels) {
      groups << l.play_id << ',' << l.source_play << '\n';
    }
  }
}

}  // namespace playalign
