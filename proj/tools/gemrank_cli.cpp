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

// gemrank: command-line driver for the ranking pipeline.
//
//   gemrank run --config run.cfg --out out/
//   gemrank split|pco|embed|aggregate|train-mlp|evaluate --out work/
//   gemrank recommend --out out/ --user 196 --top 10

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gemrank/config.hpp"
#include "gemrank/dataset.hpp"
#include "gemrank/embedding.hpp"
#include "gemrank/error.hpp"
#include "gemrank/mlp.hpp"
#include "gemrank/pco.hpp"
#include "gemrank/pipeline.hpp"
#include "gemrank/profiles.hpp"
#include "gemrank/ranking.hpp"
#include "gemrank/text_io.hpp"

namespace fs = std::filesystem;
using namespace gemrank;

namespace {

struct Flags {
  std::string config_path;
  std::string data;
  std::optional<std::size_t> upl;
  std::string basis;
  std::string variant;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
  std::optional<std::size_t> repetitions;
  std::vector<std::string> overrides;  // key=value
  // recommend
  std::string user;
  std::size_t top_n = 10;
  std::size_t rep = 0;
};

class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what) {}
};

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const SplitError& e) {
    throw StageError("split", e.what());
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

RunConfig effective_config(const Flags& f) {
  RunConfig config;
  if (!f.config_path.empty()) apply_config(parse_config_file(f.config_path), config);
  ConfigValues cli;
  for (const std::string& kv : f.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      return s;
    };
    cli[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
  }
  if (!f.data.empty()) cli["dataset.path"] = f.data;
  if (f.upl) cli["split.upl"] = std::to_string(*f.upl);
  if (!f.basis.empty()) cli["pipeline.basis"] = f.basis;
  if (!f.variant.empty()) cli["pipeline.variant"] = f.variant;
  if (f.seed) cli["run.seed"] = std::to_string(*f.seed);
  if (!f.out.empty()) cli["run.out"] = f.out;
  if (f.threads) cli["run.threads"] = std::to_string(*f.threads);
  if (f.repetitions) cli["eval.repetitions"] = std::to_string(*f.repetitions);
  apply_config(cli, config);
  return config;
}

void echo_config(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  std::ofstream out(config.out_dir / "effective_config.txt");
  write_config(out, config);
}

Dataset load_dataset(const RunConfig& config) {
  return stage("ingest", [&] {
    auto path = resolve_dataset_path(config);
    return index_dataset(parse_ratings_file(path, config.parse), config.parse.r_max);
  });
}

// Seeds of repetition 0, used by the single-split stage commands.
PipelineConfig stage_config(const RunConfig& config) {
  PipelineConfig p = config.pipeline;
  const StageSeeds seeds = stage_seeds(p.seed, 0);
  p.split.seed = seeds.split;
  p.embedding.seed = seeds.embedding;
  p.mlp.seed = seeds.mlp;
  return p;
}

void write_trace(const fs::path& path, const TrainingTrace& trace) {
  std::ofstream out(path);
  out << "epoch\tcost\n";
  for (std::size_t e = 0; e < trace.cost_per_epoch.size(); ++e) {
    out << e + 1 << '\t' << format_double(trace.cost_per_epoch[e]) << '\n';
  }
}

void write_selection(const fs::path& path, const SelectionReport& report) {
  std::ofstream out(path);
  out << "hidden\tvalidation_loss\tfirst_epoch_train_loss\tfinal_train_loss\tchosen\n";
  for (const CandidateResult& c : report.candidates) {
    out << c.hidden << '\t' << format_double(c.validation_loss) << '\t'
        << format_double(c.first_epoch_train_loss) << '\t'
        << format_double(c.final_train_loss) << '\t'
        << (c.hidden == report.chosen_hidden ? 1 : 0) << '\n';
  }
}

void write_state(const fs::path& dir, const PipelineState& state) {
  write_split(dir, state.split);
  if (state.pco) write_pco_file(dir / "pco.tsv", *state.pco);
  if (state.embedding) {
    write_vectors_file(dir / "target.emb", state.embedding->target);
    write_vectors_file(dir / "context.emb", state.embedding->context);
  }
  write_trace(dir / "embedding_trace.tsv", state.embedding_trace);
  write_vectors_file(dir / "user_vectors.emb", state.user_vectors);
  write_vectors_file(dir / "item_vectors.emb", state.item_vectors);
  if (state.mlp) {
    write_mlp_file(dir / "mlp.model", state.mlp->model);
    write_selection(dir / "mlp_selection.tsv", state.mlp->report);
  }
}

void write_reports(const fs::path& dir, const std::vector<EvalReport>& reports) {
  std::ofstream text(dir / "report.txt");
  write_report_text(text, reports);
  std::ofstream tsv(dir / "report.tsv");
  write_report_tsv(tsv, reports);
  write_report_text(std::cout, reports);
}

// Loads a stage directory's split and final vector tables.
PipelineState load_state(const fs::path& dir, const RunConfig& config,
                         bool need_mlp) {
  PipelineState state;
  state.split = stage("load", [&] { return read_split(dir, config.parse.r_max); });
  stage("load", [&] {
    state.user_vectors = read_vectors_file(dir / "user_vectors.emb");
    state.item_vectors = read_vectors_file(dir / "item_vectors.emb");
    if (state.user_vectors.rows() != state.split.train.num_users ||
        state.item_vectors.rows() != state.split.train.num_items) {
      throw Error("vector tables do not match the split in " + dir.string());
    }
    if (need_mlp) {
      MlpFit fit;
      fit.model = read_mlp_file(dir / "mlp.model");
      state.mlp = std::move(fit);
    }
    return 0;
  });
  return state;
}

int cmd_run(const Flags& f) {
  RunConfig config = effective_config(f);
  stage("config", [&] { validate(config.pipeline); return 0; });
  echo_config(config);
  Dataset dataset = load_dataset(config);
  EvalReport report = stage("pipeline", [&] {
    return evaluate(dataset, config.pipeline,
                    [&](std::size_t rep, Variant, const PipelineState& state) {
                      write_state(config.out_dir / ("rep_" + std::to_string(rep)),
                                  state);
                    });
  });
  write_reports(config.out_dir, {report});
  return 0;
}

int cmd_split(const Flags& f) {
  RunConfig config = effective_config(f);
  echo_config(config);
  Dataset dataset = load_dataset(config);
  PipelineConfig p = stage_config(config);
  TrainTestSplit split = stage("split", [&] { return split_upl(dataset, p.split); });
  write_split(config.out_dir, split);
  std::cout << "split: " << split.included_users.size() << " users, "
            << split.train.ratings.size() << " train ratings\n";
  return 0;
}

int cmd_pco(const Flags& f) {
  RunConfig config = effective_config(f);
  echo_config(config);
  TrainTestSplit split =
      stage("load", [&] { return read_split(config.out_dir, config.parse.r_max); });
  PcoMatrix pco = stage("pco", [&] {
    return build_pco(split.train, config.pipeline.basis, config.pipeline.threads);
  });
  write_pco_file(config.out_dir / "pco.tsv", pco);
  std::cout << "pco: " << pco.size() << " entities, " << pco.stored_entries() / 2
            << " co-occurring pairs\n";
  return 0;
}

int cmd_embed(const Flags& f) {
  RunConfig config = effective_config(f);
  echo_config(config);
  PipelineConfig p = stage_config(config);
  TrainTestSplit split =
      stage("load", [&] { return read_split(config.out_dir, config.parse.r_max); });
  if (p.variant == Variant::UserItemMf) {
    UserItemFactors factors =
        stage("embed", [&] { return factorize_user_item(split, p.embedding); });
    write_vectors_file(config.out_dir / "user_vectors.emb", factors.users);
    write_vectors_file(config.out_dir / "item_vectors.emb", factors.items);
    write_trace(config.out_dir / "embedding_trace.tsv", factors.trace);
    return 0;
  }
  PcoMatrix pco = stage("load", [&] {
    return read_pco_file(config.out_dir / "pco.tsv",
                         basic_entity_count(split.train, p.basis), p.basis);
  });
  EmbeddingFit fit = stage("embed", [&] { return factorize_pco(pco, p.embedding); });
  write_vectors_file(config.out_dir / "target.emb", fit.model.target);
  write_vectors_file(config.out_dir / "context.emb", fit.model.context);
  write_trace(config.out_dir / "embedding_trace.tsv", fit.trace);
  std::cout << "embed: cost " << fit.trace.cost_per_epoch.front() << " -> "
            << fit.trace.cost_per_epoch.back() << '\n';
  return 0;
}

int cmd_aggregate(const Flags& f) {
  RunConfig config = effective_config(f);
  echo_config(config);
  const PipelineConfig& p = config.pipeline;
  if (p.variant == Variant::UserItemMf) {
    std::cout << "aggregate: not used by user-item-mf (embed wrote both tables)\n";
    return 0;
  }
  TrainTestSplit split =
      stage("load", [&] { return read_split(config.out_dir, config.parse.r_max); });
  EmbeddingModel model;
  stage("load", [&] {
    model.target = read_vectors_file(config.out_dir / "target.emb");
    model.context = read_vectors_file(config.out_dir / "context.emb");
    model.basis = p.basis;
    return 0;
  });
  EntityVectors aggregated = stage("aggregate", [&] {
    return aggregate(model, split, p.aggregation,
                     {p.basis, p.embedding.representation, p.l2_normalize});
  });
  Matrix basic = representation_table(model, p.embedding.representation);
  const bool items = p.basis == Basis::ItemBased;
  write_vectors_file(config.out_dir / "user_vectors.emb",
                     items ? aggregated.vectors : basic);
  write_vectors_file(config.out_dir / "item_vectors.emb",
                     items ? basic : aggregated.vectors);
  return 0;
}

int cmd_train_mlp(const Flags& f) {
  RunConfig config = effective_config(f);
  echo_config(config);
  PipelineConfig p = stage_config(config);
  PipelineState state = load_state(config.out_dir, config, false);
  stage("train-mlp", [&] { train_predictor(state, p.mlp); return 0; });
  write_mlp_file(config.out_dir / "mlp.model", state.mlp->model);
  write_selection(config.out_dir / "mlp_selection.tsv", state.mlp->report);
  std::cout << "train-mlp: chose hidden = " << state.mlp->report.chosen_hidden << '\n';
  return 0;
}

int cmd_evaluate(const Flags& f) {
  RunConfig config = effective_config(f);
  echo_config(config);
  const PipelineConfig& p = config.pipeline;
  const bool mlp = p.variant != Variant::GemrankSimple;
  PipelineState state = load_state(config.out_dir, config, mlp);
  EvalReport report;
  report.variant = variant_label(p.basis, p.variant);
  report.upl = p.split.upl;
  report.n_values = p.n_values;
  report.per_repetition.push_back(stage("evaluate", [&] {
    return mean_ndcg(state, p.variant, p.n_values, p.threads);
  }));
  report.users_per_repetition.push_back(state.split.included_users.size());
  report.mean = report.per_repetition.front();
  report.stddev.assign(report.mean.size(), 0.0);
  write_reports(config.out_dir, {report});
  return 0;
}

int cmd_recommend(const Flags& f) {
  RunConfig config = effective_config(f);
  const PipelineConfig& p = config.pipeline;
  fs::path dir = config.out_dir;
  if (!fs::exists(dir / "users.tsv")) dir /= "rep_" + std::to_string(f.rep);
  const bool mlp = p.variant != Variant::GemrankSimple;
  PipelineState state = stage("recommend", [&] {
    if (!fs::exists(dir / "users.tsv")) {
      throw Error("no trained artifacts in " + config.out_dir.string());
    }
    return load_state(dir, config, mlp);
  });
  const Dataset& train = state.split.train;
  std::uint32_t user = 0;
  stage("recommend", [&] {
    auto it = std::find(train.user_ids.begin(), train.user_ids.end(), f.user);
    if (it == train.user_ids.end()) throw Error("unknown user id '" + f.user + "'");
    user = static_cast<std::uint32_t>(it - train.user_ids.begin());
    return 0;
  });
  std::vector<bool> rated(train.num_items, false);
  for (const ProfileEntry& e : train.user_profiles[user]) rated[e.index] = true;
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t i = 0; i < train.num_items; ++i) {
    if (!rated[i]) candidates.push_back(i);
  }
  if (f.top_n == 0 || candidates.empty()) return 0;
  Ranking ranking =
      stage("recommend", [&] { return rank_user(state, p.variant, user, candidates); });
  const std::size_t shown = std::min(f.top_n, ranking.items.size());
  for (std::size_t k = 0; k < shown; ++k) {
    std::cout << train.item_ids[ranking.items[k].item] << '\t'
              << format_double(ranking.items[k].score) << '\n';
  }
  return 0;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "key = value config file");
  cmd->add_option("--data", f.data, "ratings file (default $GEMRANK_DATA_DIR/u.data)");
  cmd->add_option("--upl", f.upl, "train ratings per user");
  cmd->add_option("--basis", f.basis, "item|user");
  cmd->add_option("--variant", f.variant, "gemrank-mlp|gemrank-simple|user-item-mf");
  cmd->add_option("--seed", f.seed, "global seed");
  cmd->add_option("--out", f.out, "output / working directory");
  cmd->add_option("--threads", f.threads, "worker threads (1 = deterministic)");
  cmd->add_option("--repetitions", f.repetitions, "split repetitions for run");
  cmd->add_option("--set", f.overrides, "override any config key: key=value");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEMRank collaborative ranking pipeline"};
  app.require_subcommand(1);
  Flags flags;

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Flags&);
  };
  const Command commands[] = {
      {"run", "all stages over every repetition, with report", cmd_run},
      {"split", "write a UPL train/test split", cmd_split},
      {"pco", "build the co-occurrence matrix of a split", cmd_pco},
      {"embed", "factorize pco.tsv (or the user-item matrix)", cmd_embed},
      {"aggregate", "derive non-basic entity vectors", cmd_aggregate},
      {"train-mlp", "train the interest predictor", cmd_train_mlp},
      {"evaluate", "NDCG of the stage directory's model", cmd_evaluate},
      {"recommend", "top-N unrated items for one user", cmd_recommend},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Flags&)>> handlers;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, flags);
    if (std::string(c.name) == "recommend") {
      sub->add_option("--user", flags.user, "external user id")->required();
      sub->add_option("--top", flags.top_n, "number of items to print");
      sub->add_option("--rep", flags.rep, "repetition directory to read");
    }
    handlers.emplace_back(sub, c.fn);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [sub, fn] : handlers) {
      if (sub->parsed()) return fn(flags);
    }
  } catch (const StageError& e) {
    std::cerr << "gemrank: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "gemrank: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
