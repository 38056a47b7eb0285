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

#ifndef GEMRANK_PIPELINE_HPP_
#define GEMRANK_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gemrank/dataset.hpp"
#include "gemrank/embedding.hpp"
#include "gemrank/mlp.hpp"
#include "gemrank/pco.hpp"
#include "gemrank/profiles.hpp"
#include "gemrank/ranking.hpp"

namespace gemrank {

enum class Variant { GemrankMlp, GemrankSimple, UserItemMf };

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view text);

struct PipelineConfig {
  Basis basis = Basis::ItemBased;
  Variant variant = Variant::GemrankMlp;
  Aggregation aggregation = Aggregation::RateCentered;
  bool l2_normalize = false;
  SplitConfig split;  // split.seed is replaced by the derived stage seed
  EmbeddingConfig embedding;
  MlpConfig mlp;
  std::vector<std::size_t> n_values{5, 10};
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

void validate(const PipelineConfig& config);

// Every random stage of repetition `rep` is seeded with
// derive_seed(global, "<stage>/rep=<rep>"), stage in {split, embedding, mlp}.
struct StageSeeds {
  std::uint64_t split;
  std::uint64_t embedding;
  std::uint64_t mlp;
};
StageSeeds stage_seeds(std::uint64_t global_seed, std::size_t repetition);

// Report label, e.g. "item-based", "user-based-simple", "user-item".
std::string variant_label(Basis basis, Variant variant);

// Artifacts of one repetition.
struct PipelineState {
  TrainTestSplit split;
  std::optional<PcoMatrix> pco;
  std::optional<EmbeddingModel> embedding;
  TrainingTrace embedding_trace;
  Matrix user_vectors;  // rows indexed by user
  Matrix item_vectors;  // rows indexed by item
  std::optional<EntityVectors> aggregated;
  std::optional<MlpFit> mlp;
};

// PCO -> factorize -> aggregate, or direct user-item factorization when
// `user_item` is set. Seeds come from config.embedding.seed.
PipelineState build_representations(TrainTestSplit split,
                                    const PipelineConfig& config,
                                    bool user_item);

// One example per train rating of an included user.
std::vector<TrainingExample> make_examples(const TrainTestSplit& split,
                                           const Matrix& user_vectors,
                                           const Matrix& item_vectors);

// Trains the interest predictor on the state's vectors.
void train_predictor(PipelineState& state, const MlpConfig& config);

// Ranks `items` for `user` with the MLP (if the variant uses it) or cosine.
Ranking rank_user(const PipelineState& state, Variant variant,
                  std::uint32_t user, std::span<const std::uint32_t> items);

// Mean NDCG@n over included users, candidates = each user's test items.
std::vector<double> mean_ndcg(const PipelineState& state, Variant variant,
                              std::span<const std::size_t> n_values,
                              unsigned threads = 1);

struct EvalReport {
  std::string variant;
  std::size_t upl = 0;
  std::vector<std::size_t> n_values;
  std::vector<std::vector<double>> per_repetition;  // [rep][n]
  std::vector<double> mean;
  std::vector<double> stddev;  // sample std over repetitions, 0 for one
  std::vector<std::size_t> users_per_repetition;
};

// Called after each (repetition, variant) with the state that produced it.
using RepetitionHook =
    std::function<void(std::size_t rep, Variant variant, const PipelineState&)>;

// Runs all repetitions for each variant. Variants are evaluated on identical
// splits; the two PCO variants share one embedding per repetition.
std::vector<EvalReport> evaluate_variants(const Dataset& dataset,
                                          const PipelineConfig& config,
                                          std::span<const Variant> variants,
                                          const RepetitionHook& hook = {});

EvalReport evaluate(const Dataset& dataset, const PipelineConfig& config,
                    const RepetitionHook& hook = {});

// Fixed-width table: variant, UPL, then mean and std per cutoff.
void write_report_text(std::ostream& out, std::span<const EvalReport> reports);
// Tab-separated, full precision, one row per report plus one per repetition.
void write_report_tsv(std::ostream& out, std::span<const EvalReport> reports);

}  // namespace gemrank

#endif  // GEMRANK_PIPELINE_HPP_
