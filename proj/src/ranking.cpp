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

#include "gemrank/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "gemrank/error.hpp"

namespace gemrank {

void sort_ranking(std::vector<ScoredItem>& items) {
  std::sort(items.begin(), items.end(),
            [](const ScoredItem& a, const ScoredItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.item < b.item;
            });
}

Ranking rank_mlp(const MlpModel& model, std::uint32_t user,
                 std::span<const double> user_vector,
                 std::span<const Candidate> candidates) {
  if (candidates.empty()) throw Error("rank_mlp: empty candidate set");
  Ranking ranking{user, {}};
  ranking.items.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    ranking.items.push_back({c.item, forward(model, user_vector, c.vector)});
  }
  sort_ranking(ranking.items);
  return ranking;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine: size mismatch");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

Ranking rank_simple(std::uint32_t user, std::span<const double> user_vector,
                    std::span<const Candidate> candidates) {
  if (candidates.empty()) throw Error("rank_simple: empty candidate set");
  Ranking ranking{user, {}};
  ranking.items.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    ranking.items.push_back({c.item, cosine_similarity(user_vector, c.vector)});
  }
  sort_ranking(ranking.items);
  return ranking;
}

double ndcg_at_n(const Ranking& ranking,
                 std::span<const ProfileEntry> test_ratings, std::size_t n) {
  if (n < 1) throw Error("ndcg cutoff must be >= 1");
  std::unordered_map<std::uint32_t, int> rating_of;
  rating_of.reserve(test_ratings.size());
  for (const ProfileEntry& e : test_ratings) rating_of[e.index] = e.rating;

  auto gain = [](int r) { return std::exp2(static_cast<double>(r)) - 1.0; };
  auto discount = [](std::size_t pos) {
    return std::log2(static_cast<double>(pos) + 1.0);
  };

  double dcg = 0.0;
  const std::size_t depth = std::min(n, ranking.items.size());
  for (std::size_t pos = 1; pos <= ranking.items.size(); ++pos) {
    auto it = rating_of.find(ranking.items[pos - 1].item);
    if (it == rating_of.end()) {
      throw Error("ranked item " + std::to_string(ranking.items[pos - 1].item) +
                  " has no test rating");
    }
    if (pos <= depth) dcg += gain(it->second) / discount(pos);
  }

  std::vector<int> ideal;
  ideal.reserve(test_ratings.size());
  for (const auto& [item, r] : rating_of) ideal.push_back(r);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double best = 0.0;
  for (std::size_t pos = 1; pos <= std::min(n, ideal.size()); ++pos) {
    best += gain(ideal[pos - 1]) / discount(pos);
  }
  if (best == 0.0) return 1.0;
  return dcg / best;
}

}  // namespace gemrank
