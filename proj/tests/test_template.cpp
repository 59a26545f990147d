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

#include <doctest.h>

#include <algorithm>

#include "playalign/errors.hpp"
#include "playalign/synthetic.hpp"
#include "playalign/template.hpp"
#include "test_support.hpp"

namespace pa = playalign;
using pa::testing::random_play;
using pa::testing::template_from_play;

namespace {

std::vector<pa::Play> synthetic_plays(int formations, int per, std::uint64_t seed) {
  pa::SyntheticConfig cfg;
  cfg.formations = formations;
  cfg.plays_per_formation = per;
  cfg.noise = 1.0;
  cfg.seed = seed;
  return pa::generate_synthetic(cfg).plays;
}

// Slot trajectories sorted, so templates compare up to slot relabeling.
std::vector<std::vector<double>> slot_set(const pa::Template& t) {
  std::vector<std::vector<double>> s;
  for (int i = 0; i < t.slots; ++i) {
    auto tr = t.slot_trajectory(i);
    s.emplace_back(tr.begin(), tr.end());
  }
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_SUITE("template") {
  TEST_CASE("identical plays converge at once") {
    const pa::Play p = random_play(21);
    const std::vector<pa::Play> plays(6, p);
    const auto r = pa::learn_template(plays, pa::TeamScope::offense,
                                      pa::TemplateLearnConfig(3));
    CHECK(r.iterations == 1);
    // The mean of identical values may round in the last place.
    CHECK(r.final_delta < 1e-12);
    const pa::Template t = template_from_play(p, pa::TeamScope::offense);
    REQUIRE(r.templ.positions.size() == t.positions.size());
    for (std::size_t i = 0; i < t.positions.size(); ++i) {
      CHECK(r.templ.positions[i] == doctest::Approx(t.positions[i]).epsilon(1e-14));
    }
    for (const auto& m : r.permutations) CHECK(m.is_identity());
  }

  TEST_CASE("permuted copies align onto each other") {
    const pa::Play p = random_play(22);
    const pa::Play q = pa::apply_permutation(p, pa::PermutationMap({3, 0, 4, 1, 2}),
                                             pa::TeamScope::defense);
    const std::vector<pa::Play> plays{p, q};
    const auto r = pa::learn_template(plays, pa::TeamScope::defense,
                                      pa::TemplateLearnConfig(8));
    CHECK(r.aligned[0].coords == r.aligned[1].coords);
    const pa::Template t = template_from_play(r.aligned[0], pa::TeamScope::defense);
    CHECK(r.templ == t);
    CHECK(r.objective_trace.back() == 0.0);
  }

  TEST_CASE("squared objective never increases") {
    const auto plays = synthetic_plays(3, 60, 4);
    for (auto team : {pa::TeamScope::offense, pa::TeamScope::defense}) {
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        pa::TemplateLearnConfig cfg(seed);
        cfg.convergence_threshold = 1e-6;
        const auto r = pa::learn_template(plays, team, cfg);
        REQUIRE(r.objective_trace.size() >= 2);
        for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
          CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
        }
      }
    }
  }

  TEST_CASE("returned maps are stable under one more pass") {
    const auto plays = synthetic_plays(2, 40, 5);
    const auto r = pa::learn_template(plays, pa::TeamScope::offense,
                                      pa::TemplateLearnConfig(9));
    const pa::TeamBatch batch = pa::make_team_batch(r.aligned, pa::TeamScope::offense);
    std::vector<pa::PermutationMap> perms(batch.size());
    std::vector<double> costs(batch.size());
    pa::align_batch(batch, r.templ, pa::CostMetric::squared, perms, costs);
    for (const auto& m : perms) CHECK(m.is_identity());
  }

  TEST_CASE("input order does not change the template") {
    auto plays = synthetic_plays(2, 40, 6);
    const auto a = pa::learn_template(plays, pa::TeamScope::offense,
                                      pa::TemplateLearnConfig(10));
    std::reverse(plays.begin(), plays.end());
    pa::Rng rng(1);
    rng.shuffle(plays);
    const auto b = pa::learn_template(plays, pa::TeamScope::offense,
                                      pa::TemplateLearnConfig(10));
    const auto sa = slot_set(a.templ);
    const auto sb = slot_set(b.templ);
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
      for (std::size_t j = 0; j < sa[i].size(); ++j) {
        CHECK(sa[i][j] == doctest::Approx(sb[i][j]).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("mean position templates have one frame") {
    const auto plays = synthetic_plays(1, 20, 7);
    pa::TemplateLearnConfig cfg(2);
    cfg.granularity = pa::TemplateGranularity::mean_position;
    const auto r = pa::learn_template(plays, pa::TeamScope::offense, cfg);
    CHECK(r.templ.frames == 1);
    CHECK(r.templ.positions.size() == 10);
  }

  TEST_CASE("template delta") {
    const pa::Template t = template_from_play(random_play(23), pa::TeamScope::offense);
    CHECK(pa::template_delta(t, t) == 0.0);
    pa::Template all = t;
    for (std::size_t i = 0; i < all.positions.size(); i += 2) {
      all.positions[i] += 3.0;
      all.positions[i + 1] += 4.0;
    }
    CHECK(pa::template_delta(t, all) == doctest::Approx(5.0));
    pa::Template one = t;
    for (int f = 0; f < one.frames; ++f) one.positions[f * 2] += 5.0;
    CHECK(pa::template_delta(t, one) == doctest::Approx(1.0));
    pa::Template other = t;
    other.frames = 1;
    other.positions.resize(10);
    CHECK_THROWS_AS(pa::template_delta(t, other), pa::DimensionError);
  }

  TEST_CASE("config validation") {
    pa::TemplateLearnConfig cfg(1);
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(pa::validate(cfg), pa::InvalidArgument);
    const std::vector<pa::Play> none;
    CHECK_THROWS_AS(pa::learn_template(none, pa::TeamScope::offense,
                                       pa::TemplateLearnConfig(1)),
                    pa::InvalidArgument);
  }
}
