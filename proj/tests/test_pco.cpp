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
#include <sstream>

#include "doctest.h"
#include "gemrank/pco.hpp"
#include "oracles.hpp"

using namespace gemrank;

namespace {

void require_matches_oracle(const Dataset& d, Basis basis, unsigned threads = 1) {
  PcoMatrix pco = build_pco(d, basis, threads);
  auto expected = oracle::brute_force_pco(d, basis == Basis::ItemBased);
  std::size_t stored = 0;
  for (std::size_t i = 0; i < pco.size(); ++i) {
    for (const auto& nb : pco.row(i)) {
      ++stored;
      auto it = expected.find({static_cast<std::uint32_t>(i), nb.index});
      REQUIRE(it != expected.end());
      REQUIRE(it->second == nb.count);
    }
  }
  REQUIRE(stored == expected.size());
}

}  // namespace

TEST_CASE("two users sharing {A, B}") {
  Dataset d = index_dataset({{"u1", "A", 5, 0}, {"u1", "B", 3, 0},
                             {"u2", "A", 1, 0}, {"u2", "B", 2, 0}});
  PcoMatrix items = build_pco(d, Basis::ItemBased);
  CHECK(items.count(0, 1) == 2);
  CHECK(items.count(1, 0) == 2);
  CHECK(items.count(0, 0) == 0);
  PcoMatrix users = build_pco(d, Basis::UserBased);
  CHECK(users.count(0, 1) == 2);
}

TEST_CASE("disjoint profiles give an empty matrix") {
  Dataset d = index_dataset({{"u1", "A", 5, 0}, {"u2", "B", 3, 0}});
  PcoMatrix pco = build_pco(d, Basis::ItemBased);
  CHECK(pco.size() == 2);
  CHECK(pco.empty());
}

TEST_CASE("random 20 x 15 dataset equals the counting oracle") {
  std::mt19937_64 gen(2024);
  Dataset d = oracle::random_dataset(gen, 20, 15, 0.4);
  require_matches_oracle(d, Basis::ItemBased);
  require_matches_oracle(d, Basis::UserBased);
}

TEST_CASE("thread count does not change the matrix") {
  std::mt19937_64 gen(8);
  Dataset d = oracle::random_dataset(gen, 40, 30, 0.3);
  for (Basis b : {Basis::ItemBased, Basis::UserBased}) {
    CHECK(build_pco(d, b, 1) == build_pco(d, b, 3));
  }
}

TEST_CASE("property: oracle equivalence, symmetry and count bound (200 cases)") {
  std::mt19937_64 gen(77);
  for (int t = 0; t < 200; ++t) {
    Dataset d = oracle::random_dataset(gen, 2 + gen() % 30, 2 + gen() % 20,
                                       0.1 + 0.5 * (gen() % 100) / 100.0);
    for (Basis b : {Basis::ItemBased, Basis::UserBased}) {
      require_matches_oracle(d, b);
      PcoMatrix pco = build_pco(d, b);
      const auto& own = b == Basis::ItemBased ? d.item_profiles : d.user_profiles;
      for (std::size_t i = 0; i < pco.size(); ++i) {
        for (const auto& nb : pco.row(i)) {
          REQUIRE(nb.index != i);
          REQUIRE(nb.count >= 1);
          REQUIRE(pco.count(nb.index, i) == nb.count);
          REQUIRE(nb.count <= std::min(own[i].size(), own[nb.index].size()));
        }
      }
    }
  }
}

TEST_CASE("smooth") {
  CHECK(smooth(0.0) == 0.0);
  CHECK(smooth(1.0) == 1.0);
  CHECK(smooth(0.5) == 0.5);
  // ln(100) to 30 digits: 4.60517018598809136803598290937
  CHECK(smooth(100.0) == doctest::Approx(4.605170185988091368).epsilon(1e-15));
  CHECK(smooth(8.0, LogBase::Two) == doctest::Approx(3.0));
}

TEST_CASE("property: smooth is monotone on counts (200 cases)") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 200; ++t) {
    double x = static_cast<double>(gen() % 1000);
    double y = x + static_cast<double>(gen() % 1000);
    REQUIRE(smooth(x) <= smooth(y));
  }
}

TEST_CASE("dump is canonical and reads back") {
  std::mt19937_64 gen(12);
  Dataset d = oracle::random_dataset(gen, 15, 12, 0.4);
  PcoMatrix pco = build_pco(d, Basis::ItemBased);
  std::ostringstream out;
  write_pco(out, pco);
  std::istringstream in(out.str());
  std::string line;
  long long prev_i = -1, prev_j = -1;
  while (std::getline(in, line)) {
    long long i, j, c;
    std::istringstream fields(line);
    fields >> i >> j >> c;
    REQUIRE(i < j);
    REQUIRE((i > prev_i || (i == prev_i && j > prev_j)));
    prev_i = i;
    prev_j = j;
  }
  std::istringstream again(out.str());
  CHECK(read_pco(again, pco.size(), Basis::ItemBased) == pco);
}
