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

#ifndef GEMRANK_PROFILES_HPP_
#define GEMRANK_PROFILES_HPP_

#include <span>
#include <string_view>
#include <vector>

#include "gemrank/dataset.hpp"
#include "gemrank/embedding.hpp"
#include "gemrank/matrix.hpp"
#include "gemrank/pco.hpp"

namespace gemrank {

enum class Aggregation { Binary, RateCentered };

std::string_view to_string(Aggregation aggregation);
Aggregation parse_aggregation(std::string_view text);

struct AggregationOptions {
  // Basis the caller expects the model to have been trained on.
  Basis basis = Basis::ItemBased;
  Representation representation = Representation::Target;
  bool l2_normalize = false;
};

// Vectors for the non-basic entity: users under an item basis, items under a
// user basis.
struct EntityVectors {
  Matrix vectors;
  Aggregation aggregation = Aggregation::Binary;
  std::vector<double> means;  // per-entity train rating mean, RateCentered only
};

// u = sum of basic vectors over the train profile.
EntityVectors aggregate_binary(const EmbeddingModel& model,
                               const TrainTestSplit& split,
                               const AggregationOptions& options);

// u = sum of (r - mean) * basic vector over the train profile, where mean is
// taken over the same train profile. A profile with one distinct rating value
// yields the zero vector.
EntityVectors aggregate_rate_centered(const EmbeddingModel& model,
                                      const TrainTestSplit& split,
                                      const AggregationOptions& options);

EntityVectors aggregate(const EmbeddingModel& model, const TrainTestSplit& split,
                        Aggregation aggregation,
                        const AggregationOptions& options);

// Core of both aggregations over explicit profiles and basic vectors.
EntityVectors aggregate_profiles(const Matrix& basic_vectors,
                                 std::span<const Profile> profiles,
                                 Aggregation aggregation, bool l2_normalize);

}  // namespace gemrank

#endif  // GEMRANK_PROFILES_HPP_
