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

#ifndef GEMRANK_RANKING_HPP_
#define GEMRANK_RANKING_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "gemrank/dataset.hpp"
#include "gemrank/mlp.hpp"

namespace gemrank {

struct ScoredItem {
  std::uint32_t item = 0;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Sorted by descending score, ties by ascending item index.
struct Ranking {
  std::uint32_t user = 0;
  std::vector<ScoredItem> items;
};

struct Candidate {
  std::uint32_t item = 0;
  std::span<const double> vector;
};

// Sorts in place into ranking order.
void sort_ranking(std::vector<ScoredItem>& items);

// Scores with the MLP. Throws Error on an empty candidate set.
Ranking rank_mlp(const MlpModel& model, std::uint32_t user,
                 std::span<const double> user_vector,
                 std::span<const Candidate> candidates);

// Scores by cosine similarity; a zero-norm side scores 0.
Ranking rank_simple(std::uint32_t user, std::span<const double> user_vector,
                    std::span<const Candidate> candidates);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Exponential-gain NDCG at cutoff n with log2(position + 1) discount. The
// ideal DCG is taken over `test_ratings`; every ranked item must appear there
// (Error otherwise). Returns 1 when the ideal DCG is 0.
double ndcg_at_n(const Ranking& ranking, std::span<const ProfileEntry> test_ratings,
                 std::size_t n);

}  // namespace gemrank

#endif  // GEMRANK_RANKING_HPP_
