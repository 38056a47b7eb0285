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

#ifndef GEMRANK_EMBEDDING_HPP_
#define GEMRANK_EMBEDDING_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gemrank/dataset.hpp"
#include "gemrank/matrix.hpp"
#include "gemrank/pco.hpp"

namespace gemrank {

// Which learned table stands in for an entity downstream.
enum class Representation { Target, Context, Sum };

std::string_view to_string(Representation mode);
Representation parse_representation(std::string_view text);

struct EmbeddingConfig {
  std::size_t dim = 100;
  double learning_rate = 0.05;
  double lr_decay = 0.95;  // learning rate multiplier applied after each epoch
  std::size_t epochs = 50;
  double init_scale = 0.01;
  std::uint64_t seed = 0;
  std::size_t zero_pair_samples_per_entity = 0;
  Representation representation = Representation::Target;
  LogBase log_base = LogBase::Natural;
};

// Throws ConfigError when a field is out of its valid range.
void validate(const EmbeddingConfig& config);

struct EmbeddingModel {
  Matrix target;   // v_i
  Matrix context;  // v'_j
  Basis basis = Basis::ItemBased;

  std::size_t size() const { return target.rows(); }
  std::size_t dim() const { return target.cols(); }
};

struct TrainingTrace {
  // Cost over the fixed (non-sampled) pair set after each epoch.
  std::vector<double> cost_per_epoch;
};

// One regression target for the dot product of a target row and a context
// column.
struct PairTarget {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  double value = 0.0;
};

struct EmbeddingFit {
  EmbeddingModel model;
  TrainingTrace trace;
};

// Every stored PCO entry in both orientations with target f(P_ij).
// Gradient of (v . c - target)^2 with respect to v and c.
void pair_gradient(std::span<const double> v, std::span<const double> c,
                   double target, std::span<double> grad_v,
                   std::span<double> grad_c);

std::vector<PairTarget> pco_pair_targets(const PcoMatrix& pco, LogBase base);

// Plain SGD on sum (target_row . context_col - value)^2 over shuffled pairs,
// learning rate decayed per epoch. Rows and columns are sized `rows` and
// `cols`. Throws TrainingError naming the epoch if a parameter goes
// non-finite.
EmbeddingFit factorize_targets(std::size_t rows, std::size_t cols,
                               std::span<const PairTarget> targets,
                               const EmbeddingConfig& config,
                               Basis basis = Basis::ItemBased);

// Factorizes the smoothed PCO matrix. With zero_pair_samples_per_entity > 0
// each entity additionally receives that many freshly drawn zero-count
// partners per epoch, with target 0.
EmbeddingFit factorize_pco(const PcoMatrix& pco, const EmbeddingConfig& config);

// Sum of squared residuals over `targets`.
double cost(const EmbeddingModel& model, std::span<const PairTarget> targets);

// Cost over every stored PCO entry, both orientations. Throws DimensionError
// when the model and matrix sizes differ.
double cost(const EmbeddingModel& model, const PcoMatrix& pco,
            LogBase base = LogBase::Natural);

std::vector<double> entity_vector(const EmbeddingModel& model,
                                  std::size_t index, Representation mode);

// entity_vector for every index, stacked as rows.
Matrix representation_table(const EmbeddingModel& model, Representation mode);

struct UserItemFactors {
  Matrix users;
  Matrix items;
  TrainingTrace trace;
};

// Direct factorization of the train interest matrix (rating / r_max) over
// observed entries only.
UserItemFactors factorize_user_item(const TrainTestSplit& split,
                                    const EmbeddingConfig& config);

}  // namespace gemrank

#endif  // GEMRANK_EMBEDDING_HPP_
