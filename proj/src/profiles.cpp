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

#include "gemrank/profiles.hpp"

#include <cmath>
#include <string>

#include "gemrank/error.hpp"

namespace gemrank {

std::string_view to_string(Aggregation aggregation) {
  return aggregation == Aggregation::Binary ? "binary" : "rate-centered";
}

Aggregation parse_aggregation(std::string_view text) {
  if (text == "binary") return Aggregation::Binary;
  if (text == "rate-centered" || text == "rate_centered") {
    return Aggregation::RateCentered;
  }
  throw ConfigError("unknown aggregation '" + std::string(text) + "'");
}

EntityVectors aggregate_profiles(const Matrix& basic_vectors,
                                 std::span<const Profile> profiles,
                                 Aggregation aggregation, bool l2_normalize) {
  EntityVectors out;
  out.aggregation = aggregation;
  out.vectors = Matrix(profiles.size(), basic_vectors.cols());
  if (aggregation == Aggregation::RateCentered) {
    out.means.assign(profiles.size(), 0.0);
  }
  for (std::size_t e = 0; e < profiles.size(); ++e) {
    const Profile& profile = profiles[e];
    double mean = 0.0;
    if (aggregation == Aggregation::RateCentered && !profile.empty()) {
      for (const ProfileEntry& p : profile) mean += p.rating;
      mean /= static_cast<double>(profile.size());
      out.means[e] = mean;
    }
    auto acc = out.vectors.row(e);
    for (const ProfileEntry& p : profile) {
      if (p.index >= basic_vectors.rows()) {
        throw DimensionError("profile refers to basic entity " +
                             std::to_string(p.index) + " beyond the model");
      }
      const double w =
          aggregation == Aggregation::Binary ? 1.0 : p.rating - mean;
      auto v = basic_vectors.row(p.index);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * v[k];
    }
    if (l2_normalize) {
      double norm = std::sqrt(dot(acc, acc));
      if (norm > 0.0) {
        for (double& x : acc) x /= norm;
      }
    }
  }
  return out;
}

namespace {

EntityVectors aggregate_checked(const EmbeddingModel& model,
                                const TrainTestSplit& split,
                                Aggregation aggregation,
                                const AggregationOptions& options) {
  const Dataset& train = split.train;
  if (model.basis != options.basis) {
    throw Error("basis mismatch: model is " + std::string(to_string(model.basis)) +
                "-based, aggregation expects " +
                std::string(to_string(options.basis)) + "-based");
  }
  if (model.size() != basic_entity_count(train, options.basis)) {
    throw Error("basis mismatch: model has " + std::to_string(model.size()) +
                " entities, split has " +
                std::to_string(basic_entity_count(train, options.basis)));
  }
  const auto& profiles = options.basis == Basis::ItemBased
                             ? train.user_profiles
                             : train.item_profiles;
  return aggregate_profiles(representation_table(model, options.representation),
                            profiles, aggregation, options.l2_normalize);
}

}  // namespace

EntityVectors aggregate_binary(const EmbeddingModel& model,
                               const TrainTestSplit& split,
                               const AggregationOptions& options) {
  return aggregate_checked(model, split, Aggregation::Binary, options);
}

EntityVectors aggregate_rate_centered(const EmbeddingModel& model,
                                      const TrainTestSplit& split,
                                      const AggregationOptions& options) {
  return aggregate_checked(model, split, Aggregation::RateCentered, options);
}

EntityVectors aggregate(const EmbeddingModel& model, const TrainTestSplit& split,
                        Aggregation aggregation,
                        const AggregationOptions& options) {
  return aggregate_checked(model, split, aggregation, options);
}

}  // namespace gemrank
