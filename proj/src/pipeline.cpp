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

#include "gemrank/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "gemrank/error.hpp"
#include "gemrank/parallel.hpp"
#include "gemrank/text_io.hpp"

namespace gemrank {

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::GemrankMlp:
      return "gemrank-mlp";
    case Variant::GemrankSimple:
      return "gemrank-simple";
    case Variant::UserItemMf:
      return "user-item-mf";
  }
  return "gemrank-mlp";
}

Variant parse_variant(std::string_view text) {
  if (text == "gemrank-mlp" || text == "mlp") return Variant::GemrankMlp;
  if (text == "gemrank-simple" || text == "simple") return Variant::GemrankSimple;
  if (text == "user-item-mf" || text == "user-item") return Variant::UserItemMf;
  throw ConfigError("unknown variant '" + std::string(text) + "'");
}

void validate(const PipelineConfig& config) {
  validate(config.embedding);
  if (config.variant != Variant::GemrankSimple) validate(config.mlp);
  if (config.split.upl < 1 || config.split.min_test_items < 1) {
    throw ConfigError("split.upl and split.min_test_items must be >= 1");
  }
  if (config.n_values.empty()) throw ConfigError("eval.n_values is empty");
  for (std::size_t n : config.n_values) {
    if (n < 1) throw ConfigError("eval.n_values entries must be >= 1");
  }
  if (config.repetitions < 1) throw ConfigError("eval.repetitions must be >= 1");
}

StageSeeds stage_seeds(std::uint64_t global_seed, std::size_t repetition) {
  const std::string suffix = "/rep=" + std::to_string(repetition);
  return {derive_seed(global_seed, "split" + suffix),
          derive_seed(global_seed, "embedding" + suffix),
          derive_seed(global_seed, "mlp" + suffix)};
}

std::string variant_label(Basis basis, Variant variant) {
  if (variant == Variant::UserItemMf) return "user-item";
  std::string label = basis == Basis::ItemBased ? "item-based" : "user-based";
  if (variant == Variant::GemrankSimple) label += "-simple";
  return label;
}

PipelineState build_representations(TrainTestSplit split,
                                    const PipelineConfig& config,
                                    bool user_item) {
  PipelineState state;
  state.split = std::move(split);
  if (user_item) {
    UserItemFactors factors =
        factorize_user_item(state.split, config.embedding);
    state.user_vectors = std::move(factors.users);
    state.item_vectors = std::move(factors.items);
    state.embedding_trace = std::move(factors.trace);
    return state;
  }
  state.pco = build_pco(state.split.train, config.basis, config.threads);
  EmbeddingFit fit = factorize_pco(*state.pco, config.embedding);
  state.embedding = std::move(fit.model);
  state.embedding_trace = std::move(fit.trace);

  AggregationOptions options{config.basis, config.embedding.representation,
                             config.l2_normalize};
  state.aggregated = aggregate(*state.embedding, state.split, config.aggregation,
                               options);
  Matrix basic =
      representation_table(*state.embedding, config.embedding.representation);
  if (config.basis == Basis::ItemBased) {
    state.item_vectors = std::move(basic);
    state.user_vectors = state.aggregated->vectors;
  } else {
    state.user_vectors = std::move(basic);
    state.item_vectors = state.aggregated->vectors;
  }
  return state;
}

std::vector<TrainingExample> make_examples(const TrainTestSplit& split,
                                           const Matrix& user_vectors,
                                           const Matrix& item_vectors) {
  const Dataset& train = split.train;
  if (user_vectors.rows() != train.num_users ||
      item_vectors.rows() != train.num_items ||
      user_vectors.cols() != item_vectors.cols()) {
    throw DimensionError("entity vector tables do not match the split");
  }
  std::vector<TrainingExample> examples;
  examples.reserve(train.ratings.size());
  for (std::uint32_t u : split.included_users) {
    for (const ProfileEntry& e : train.user_profiles[u]) {
      examples.push_back({user_vectors.row(u), item_vectors.row(e.index),
                          static_cast<double>(e.rating) / train.r_max});
    }
  }
  return examples;
}

void train_predictor(PipelineState& state, const MlpConfig& config) {
  auto examples =
      make_examples(state.split, state.user_vectors, state.item_vectors);
  state.mlp = train_mlp(examples, config, state.user_vectors.cols());
}

Ranking rank_user(const PipelineState& state, Variant variant,
                  std::uint32_t user, std::span<const std::uint32_t> items) {
  std::vector<Candidate> candidates;
  candidates.reserve(items.size());
  for (std::uint32_t i : items) {
    candidates.push_back({i, state.item_vectors.row(i)});
  }
  auto user_vector = state.user_vectors.row(user);
  if (variant == Variant::GemrankSimple) {
    return rank_simple(user, user_vector, candidates);
  }
  if (!state.mlp) throw Error("ranking requires a trained MLP");
  return rank_mlp(state.mlp->model, user, user_vector, candidates);
}

std::vector<double> mean_ndcg(const PipelineState& state, Variant variant,
                              std::span<const std::size_t> n_values,
                              unsigned threads) {
  const auto& users = state.split.included_users;
  std::vector<std::vector<double>> per_user(users.size(),
                                            std::vector<double>(n_values.size()));
  parallel_for(users.size(), threads, [&](std::size_t k) {
    const std::uint32_t u = users[k];
    const Profile& test = state.split.test[u];
    std::vector<std::uint32_t> items;
    items.reserve(test.size());
    for (const ProfileEntry& e : test) items.push_back(e.index);
    Ranking ranking = rank_user(state, variant, u, items);
    for (std::size_t c = 0; c < n_values.size(); ++c) {
      per_user[k][c] = ndcg_at_n(ranking, test, n_values[c]);
    }
  });
  // Summed in user order so the result does not depend on scheduling.
  std::vector<double> means(n_values.size(), 0.0);
  for (const auto& values : per_user) {
    for (std::size_t c = 0; c < values.size(); ++c) means[c] += values[c];
  }
  for (double& m : means) m /= static_cast<double>(users.size());
  return means;
}

std::vector<EvalReport> evaluate_variants(const Dataset& dataset,
                                          const PipelineConfig& config,
                                          std::span<const Variant> variants,
                                          const RepetitionHook& hook) {
  validate(config);
  std::vector<EvalReport> reports;
  for (Variant v : variants) {
    EvalReport r;
    r.variant = variant_label(config.basis, v);
    r.upl = config.split.upl;
    r.n_values = config.n_values;
    reports.push_back(std::move(r));
  }
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    const StageSeeds seeds = stage_seeds(config.seed, rep);
    PipelineConfig stage = config;
    stage.split.seed = seeds.split;
    stage.embedding.seed = seeds.embedding;
    stage.mlp.seed = seeds.mlp;
    const TrainTestSplit split = split_upl(dataset, stage.split);

    std::optional<PipelineState> pco_state;
    std::optional<PipelineState> mf_state;
    for (std::size_t k = 0; k < variants.size(); ++k) {
      const Variant v = variants[k];
      std::optional<PipelineState>& slot =
          v == Variant::UserItemMf ? mf_state : pco_state;
      if (!slot) {
        slot = build_representations(split, stage, v == Variant::UserItemMf);
      }
      if (v != Variant::GemrankSimple && !slot->mlp) {
        train_predictor(*slot, stage.mlp);
      }
      reports[k].per_repetition.push_back(
          mean_ndcg(*slot, v, config.n_values, config.threads));
      reports[k].users_per_repetition.push_back(split.included_users.size());
      if (hook) hook(rep, v, *slot);
    }
  }
  for (EvalReport& r : reports) {
    const std::size_t reps = r.per_repetition.size();
    r.mean.assign(r.n_values.size(), 0.0);
    r.stddev.assign(r.n_values.size(), 0.0);
    for (std::size_t c = 0; c < r.n_values.size(); ++c) {
      for (const auto& row : r.per_repetition) r.mean[c] += row[c];
      r.mean[c] /= static_cast<double>(reps);
      if (reps > 1) {
        double ss = 0.0;
        for (const auto& row : r.per_repetition) {
          ss += (row[c] - r.mean[c]) * (row[c] - r.mean[c]);
        }
        r.stddev[c] = std::sqrt(ss / static_cast<double>(reps - 1));
      }
    }
  }
  return reports;
}

EvalReport evaluate(const Dataset& dataset, const PipelineConfig& config,
                    const RepetitionHook& hook) {
  const Variant variants[] = {config.variant};
  return evaluate_variants(dataset, config, variants, hook).front();
}

void write_report_text(std::ostream& out, std::span<const EvalReport> reports) {
  char buf[64];
  out << "variant              UPL";
  if (!reports.empty()) {
    for (std::size_t n : reports.front().n_values) {
      const std::string m = "NDCG@" + std::to_string(n) + " mean";
      const std::string d = "NDCG@" + std::to_string(n) + " std";
      std::snprintf(buf, sizeof(buf), "  %14s %13s", m.c_str(), d.c_str());
      out << buf;
    }
  }
  out << '\n';
  for (const EvalReport& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-20s %4zu", r.variant.c_str(), r.upl);
    out << buf;
    for (std::size_t c = 0; c < r.n_values.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "  %14.6f %13.6f", r.mean[c], r.stddev[c]);
      out << buf;
    }
    out << '\n';
  }
}

void write_report_tsv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "variant\tupl\trepetition\tusers";
  if (!reports.empty()) {
    for (std::size_t n : reports.front().n_values) {
      out << "\tndcg@" << n << "_mean\tndcg@" << n << "_std";
    }
  }
  out << '\n';
  for (const EvalReport& r : reports) {
    out << r.variant << '\t' << r.upl << "\tall\t";
    out << (r.users_per_repetition.empty() ? 0 : r.users_per_repetition.front());
    for (std::size_t c = 0; c < r.n_values.size(); ++c) {
      out << '\t' << format_double(r.mean[c]) << '\t'
          << format_double(r.stddev[c]);
    }
    out << '\n';
    for (std::size_t rep = 0; rep < r.per_repetition.size(); ++rep) {
      out << r.variant << '\t' << r.upl << '\t' << rep << '\t'
          << r.users_per_repetition[rep];
      for (double v : r.per_repetition[rep]) out << '\t' << format_double(v) << "\t0";
      out << '\n';
    }
  }
}

}  // namespace gemrank
