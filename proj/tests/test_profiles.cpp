// Copyright 2026 The GEMRank Authors.
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

#include <cmath>
#include <random>

#include "doctest.h"
#include "gemrank/error.hpp"
#include "gemrank/profiles.hpp"
#include "oracles.hpp"

using namespace gemrank;

namespace {

EmbeddingModel model_from_rows(const std::vector<std::vector<double>>& rows,
                               Basis basis = Basis::ItemBased) {
  EmbeddingModel m;
  m.basis = basis;
  m.target = Matrix(rows.size(), rows.front().size());
  m.context = Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) m.target(i, k) = rows[i][k];
  }
  return m;
}

TrainTestSplit one_user_split(const std::vector<Rating>& ratings, std::size_t items) {
  std::vector<std::string> item_ids;
  for (std::size_t i = 0; i < items; ++i) item_ids.push_back("i" + std::to_string(i));
  TrainTestSplit s;
  s.train = Dataset::from_ratings({"u"}, item_ids, ratings, 5);
  s.test = {{}};
  s.included_users = {0};
  return s;
}

std::vector<double> row_of(const EntityVectors& e, std::size_t r) {
  auto s = e.vectors.row(r);
  return {s.begin(), s.end()};
}

Matrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = std::uniform_real_distribution<>(-1, 1)(gen);
  return m;
}

Profile random_profile(std::mt19937_64& gen, std::size_t n_basic, std::size_t len) {
  std::vector<std::uint32_t> idx(n_basic);
  for (std::uint32_t i = 0; i < n_basic; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), gen);
  Profile p;
  for (std::size_t k = 0; k < len; ++k) {
    p.push_back({idx[k], static_cast<int>(1 + gen() % 5)});
  }
  return p;
}

}  // namespace

TEST_CASE("binary aggregation examples") {
  EmbeddingModel m = model_from_rows({{1, 0}, {0, 1}, {7, 7}});
  AggregationOptions opts;
  auto single = aggregate_binary(m, one_user_split({{0, 2, 4}}, 3), opts);
  CHECK(row_of(single, 0) == std::vector<double>{7, 7});
  auto pair = aggregate_binary(m, one_user_split({{0, 0, 4}, {0, 1, 2}}, 3), opts);
  CHECK(row_of(pair, 0) == std::vector<double>{1, 1});
  CHECK(pair.means.empty());
}

TEST_CASE("rate-centered aggregation examples") {
  EmbeddingModel m = model_from_rows({{1, 0}, {0, 1}, {7, 7}});
  AggregationOptions opts;
  auto one = aggregate_rate_centered(m, one_user_split({{0, 2, 4}}, 3), opts);
  CHECK(one.means[0] == 4.0);
  CHECK(row_of(one, 0) == std::vector<double>{0, 0});
  auto two = aggregate_rate_centered(m, one_user_split({{0, 0, 5}, {0, 1, 3}}, 3), opts);
  CHECK(two.means[0] == 4.0);
  CHECK(row_of(two, 0) == std::vector<double>{1, -1});
  auto flat = aggregate_rate_centered(
      m, one_user_split({{0, 0, 3}, {0, 1, 3}, {0, 2, 3}}, 3), opts);
  CHECK(row_of(flat, 0) == std::vector<double>{0, 0});
}

TEST_CASE("binary aggregation matches a naive per-user loop") {
  std::mt19937_64 gen(40);
  Dataset d = oracle::random_dataset(gen, 10, 25, 0.6);
  TrainTestSplit split = split_upl(d, {5, 2, 1});
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < d.num_items; ++i) rows.push_back(oracle::random_vector(gen, 4));
  EmbeddingModel m = model_from_rows(rows);
  auto agg = aggregate_binary(m, split, {});
  for (std::uint32_t u = 0; u < d.num_users; ++u) {
    std::vector<double> expected(4, 0.0);
    for (const Rating& r : split.train.ratings) {
      if (r.user != u) continue;
      for (int k = 0; k < 4; ++k) expected[k] += rows[r.item][k];
    }
    for (int k = 0; k < 4; ++k) {
      CHECK(agg.vectors(u, k) == doctest::Approx(expected[k]).epsilon(1e-14));
    }
  }
}

TEST_CASE("user basis aggregates item vectors from user embeddings") {
  EmbeddingModel m = model_from_rows({{1, 0}, {0, 1}}, Basis::UserBased);
  TrainTestSplit s;
  s.train = Dataset::from_ratings({"a", "b"}, {"x"}, {{0, 0, 5}, {1, 0, 1}}, 5);
  s.test = {{}, {}};
  s.included_users = {0, 1};
  AggregationOptions opts;
  opts.basis = Basis::UserBased;
  auto items = aggregate_rate_centered(m, s, opts);
  REQUIRE(items.vectors.rows() == 1);
  CHECK(items.means[0] == 3.0);
  CHECK(row_of(items, 0) == std::vector<double>{2, -2});
}

TEST_CASE("basis mismatch is an error") {
  EmbeddingModel m = model_from_rows({{1, 0}, {0, 1}, {7, 7}});
  TrainTestSplit s = one_user_split({{0, 0, 4}}, 3);
  AggregationOptions opts;
  opts.basis = Basis::UserBased;
  CHECK_THROWS_AS(aggregate_binary(m, s, opts), Error);
  EmbeddingModel wrong_size = model_from_rows({{1, 0}, {0, 1}});
  CHECK_THROWS_AS(aggregate_binary(wrong_size, s, {}), Error);
}

TEST_CASE("l2 normalization keeps zero vectors at zero") {
  Matrix basic(2, 2);
  basic(0, 0) = 3;
  basic(1, 1) = 4;
  std::vector<Profile> profiles{{{0, 5}, {1, 5}}, {{0, 4}, {1, 2}}};
  auto binary = aggregate_profiles(basic, profiles, Aggregation::Binary, true);
  CHECK(binary.vectors(0, 0) == doctest::Approx(0.6));
  CHECK(binary.vectors(0, 1) == doctest::Approx(0.8));
  auto centered = aggregate_profiles(basic, profiles, Aggregation::RateCentered, true);
  CHECK(centered.vectors(0, 0) == 0.0);
  CHECK(centered.vectors(0, 1) == 0.0);
}

TEST_CASE("property: aggregation is linear over profile partitions (200 cases)") {
  std::mt19937_64 gen(41);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 5 + gen() % 20, dim = 1 + gen() % 6;
    Matrix basic = random_matrix(gen, n, dim);
    Profile whole = random_profile(gen, n, 2 + gen() % (n - 2));
    std::vector<Profile> parts(1 + gen() % 3);
    for (const auto& e : whole) parts[gen() % parts.size()].push_back(e);
    std::erase_if(parts, [](const Profile& p) { return p.empty(); });

    std::vector<Profile> all{whole};
    auto whole_bin = aggregate_profiles(basic, all, Aggregation::Binary, false);
    auto whole_rc = aggregate_profiles(basic, all, Aggregation::RateCentered, false);
    auto part_bin = aggregate_profiles(basic, parts, Aggregation::Binary, false);
    auto part_rc = aggregate_profiles(basic, parts, Aggregation::RateCentered, false);
    const double lambda = whole_rc.means[0];
    for (std::size_t k = 0; k < dim; ++k) {
      double bin = 0.0, rc = 0.0;
      for (std::size_t p = 0; p < parts.size(); ++p) {
        bin += part_bin.vectors(p, k);
        // Re-centre each part on the whole-profile mean.
        rc += part_rc.vectors(p, k) + (part_rc.means[p] - lambda) * part_bin.vectors(p, k);
      }
      REQUIRE(bin == doctest::Approx(whole_bin.vectors(0, k)).epsilon(1e-12).scale(1.0));
      REQUIRE(rc == doctest::Approx(whole_rc.vectors(0, k)).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("property: rate-centered vector is zero iff train ratings are equal (200 cases)") {
  std::mt19937_64 gen(42);
  for (int t = 0; t < 200; ++t) {
    const std::size_t len = 1 + gen() % 6, dim = len + gen() % 3;
    Matrix basic = random_matrix(gen, 10, dim);
    Profile p = random_profile(gen, 10, len);
    if (gen() % 2) {
      int r = static_cast<int>(1 + gen() % 5);
      for (auto& e : p) e.rating = r;
    }
    bool equal = std::all_of(p.begin(), p.end(),
                             [&](const ProfileEntry& e) { return e.rating == p[0].rating; });
    std::vector<Profile> ps{p};
    auto agg = aggregate_profiles(basic, ps, Aggregation::RateCentered, false);
    auto row = agg.vectors.row(0);
    const double norm = std::sqrt(dot(row, row));
    if (equal) {
      REQUIRE(norm == 0.0);
    } else {
      REQUIRE(norm > 1e-9);
    }
  }
}

TEST_CASE("property: test ratings never change the vectors (200 cases)") {
  std::mt19937_64 gen(43);
  for (int t = 0; t < 200; ++t) {
    Dataset d = oracle::random_dataset(gen, 6 + gen() % 10, 20, 0.7);
    TrainTestSplit split;
    try {
      split = split_upl(d, {3, 2, gen()});
    } catch (const SplitError&) {
      continue;
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < d.num_items; ++i) rows.push_back(oracle::random_vector(gen, 3));
    EmbeddingModel m = model_from_rows(rows);
    auto before = aggregate_rate_centered(m, split, {});
    TrainTestSplit grown = split;
    for (auto& profile : grown.test) {
      for (auto& e : profile) e.rating = 1 + (e.rating % 5);
      profile.push_back({0, 5});
    }
    auto after = aggregate_rate_centered(m, grown, {});
    REQUIRE(before.vectors == after.vectors);
    REQUIRE(before.means == after.means);
    for (std::uint32_t u : split.included_users) {
      double mean = 0.0;
      for (const auto& e : split.train.user_profiles[u]) mean += e.rating;
      mean /= static_cast<double>(split.train.user_profiles[u].size());
      REQUIRE(before.means[u] == doctest::Approx(mean));
    }
  }
}
