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

#include <set>

#include "playalign/kmeans.hpp"
#include "playalign/util.hpp"

namespace pa = playalign;

namespace {

std::vector<double> blobs(int per, std::vector<std::pair<double, double>> centers,
                          double spread, std::uint64_t seed) {
  pa::Rng rng(seed);
  std::vector<double> v;
  for (int i = 0; i < per; ++i) {
    for (auto [x, y] : centers) {
      v.push_back(x + rng.normal(spread));
      v.push_back(y + rng.normal(spread));
    }
  }
  return v;
}

}  // namespace

TEST_SUITE("kmeans") {
  TEST_CASE("separates blobs") {
    const auto data = blobs(50, {{0, 0}, {100, 0}, {0, 100}}, 1.0, 3);
    pa::KMeansConfig cfg;
    cfg.k = 3;
    cfg.seed = 11;
    const auto r = pa::kmeans(pa::DataView::dense(data, 2), cfg);
    REQUIRE(r.has_value());
    CHECK(r->k == 3);
    CHECK(r->converged);
    // Rows were interleaved by blob, so row i belongs to blob i % 3.
    for (int i = 0; i < 150; ++i) CHECK(r->labels[i] == r->labels[i % 3]);
    CHECK(std::set<int>(r->labels.begin(), r->labels.end()).size() == 3);
  }

  TEST_CASE("labels are nearest centroids") {
    const auto data = blobs(40, {{0, 0}, {3, 1}, {1, 4}}, 2.0, 4);
    pa::KMeansConfig cfg;
    cfg.k = 4;
    cfg.seed = 2;
    const auto view = pa::DataView::dense(data, 2);
    const auto r = pa::kmeans(view, cfg);
    REQUIRE(r.has_value());
    double inertia = 0.0;
    for (std::size_t i = 0; i < view.count; ++i) {
      CHECK(r->labels[i] == pa::nearest_centroid(view.row_span(i), r->centroids, r->k));
      const auto c = r->centroid(r->labels[i], 2);
      inertia += (view.row(i)[0] - c[0]) * (view.row(i)[0] - c[0]) +
                 (view.row(i)[1] - c[1]) * (view.row(i)[1] - c[1]);
    }
    CHECK(r->inertia == doctest::Approx(inertia));
  }

  TEST_CASE("too few distinct rows") {
    const std::vector<double> data{1, 1, 1, 1, 2, 2};
    pa::KMeansConfig cfg;
    cfg.k = 3;
    CHECK_FALSE(pa::kmeans(pa::DataView::dense(data, 2), cfg).has_value());
    cfg.k = 2;
    CHECK(pa::kmeans(pa::DataView::dense(data, 2), cfg).has_value());
  }

  TEST_CASE("indexed view matches dense subset") {
    const auto data = blobs(30, {{0, 0}, {50, 50}}, 1.0, 5);
    std::vector<std::uint32_t> rows;
    std::vector<double> dense;
    for (std::uint32_t i = 0; i < 60; i += 2) {
      rows.push_back(i);
      dense.push_back(data[2 * i]);
      dense.push_back(data[2 * i + 1]);
    }
    pa::KMeansConfig cfg;
    cfg.k = 2;
    cfg.seed = 8;
    const auto a = pa::kmeans(pa::DataView::indexed(data, 2, rows), cfg);
    const auto b = pa::kmeans(pa::DataView::dense(dense, 2), cfg);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->labels == b->labels);
    CHECK(a->centroids == b->centroids);
  }

  TEST_CASE("best of restarts is no worse and deterministic") {
    const auto data = blobs(60, {{0, 0}, {4, 0}, {2, 3}, {8, 8}}, 1.5, 6);
    pa::KMeansConfig cfg;
    cfg.k = 4;
    cfg.seed = 1;
    const auto view = pa::DataView::dense(data, 2);
    const auto one = pa::kmeans_best_of(view, cfg, 1);
    const auto many = pa::kmeans_best_of(view, cfg, 5);
    const auto again = pa::kmeans_best_of(view, cfg, 5);
    REQUIRE(one.has_value());
    REQUIRE(many.has_value());
    CHECK(many->inertia <= one->inertia);
    CHECK(many->centroids == again->centroids);
  }

  TEST_CASE("cluster means and tie rule") {
    const std::vector<double> data{0, 2, 10, 12};
    const std::vector<int> labels{0, 0, 1, 1};
    const auto means = pa::cluster_means(pa::DataView::dense(data, 1), labels, 3);
    CHECK(means == std::vector<double>{1, 11, 0});
    const std::vector<double> cents{0, 2};
    CHECK(pa::nearest_centroid(std::vector<double>{1}, cents, 2) == 0);
  }
}
