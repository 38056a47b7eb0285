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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gemrank/dataset.hpp"
#include "gemrank/embedding.hpp"
#include "gemrank/mlp.hpp"
#include "gemrank/pco.hpp"
#include "gemrank/pipeline.hpp"
#include "gemrank/ranking.hpp"
#include "gemrank/text_io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace gemrank;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double secs) {
  if (!pass) ++failures;
  char time_buf[32];
  std::snprintf(time_buf, sizeof time_buf, "%.1f s", secs);
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << detail
            << " (" << time_buf << ")" << std::endl;
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

fs::path data_file() {
  if (const char* dir = std::getenv("GEMRANK_DATA_DIR"); dir && *dir) {
    return fs::path(dir) / "u.data";
  }
  return GEMRANK_DEFAULT_DATA;
}

void pco_oracle() {
  auto start = Clock::now();
  std::mt19937_64 gen(1001);
  int mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    Dataset d = oracle::random_dataset(gen, 2 + gen() % 39, 2 + gen() % 29,
                                       0.05 + 0.6 * (gen() % 100) / 100.0);
    for (Basis b : {Basis::ItemBased, Basis::UserBased}) {
      PcoMatrix pco = build_pco(d, b);
      auto expected = oracle::brute_force_pco(d, b == Basis::ItemBased);
      std::size_t stored = 0;
      bool ok = true;
      for (std::size_t i = 0; i < pco.size(); ++i) {
        for (const auto& nb : pco.row(i)) {
          ++stored;
          auto it = expected.find({static_cast<std::uint32_t>(i), nb.index});
          ok = ok && it != expected.end() && it->second == nb.count;
        }
      }
      if (!ok || stored != expected.size()) ++mismatches;
    }
  }
  double secs = seconds_since(start);
  report(1, "PCO oracle equivalence", mismatches == 0 && secs < 10.0,
         "50 datasets x 2 bases, " + std::to_string(mismatches) + " mismatches", secs);
}

void ndcg_oracle() {
  auto start = Clock::now();
  std::mt19937_64 gen(1002);
  double worst = 0.0;
  int ideal_misses = 0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t len = 1 + gen() % 20;
    Profile test;
    for (std::uint32_t i = 0; i < len; ++i) {
      test.push_back({i, static_cast<int>(1 + gen() % 5)});
    }
    std::vector<std::uint32_t> order(len);
    for (std::uint32_t i = 0; i < len; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    std::size_t n = 1 + gen() % 25;

    Ranking r;
    std::vector<int> ranked, all;
    for (std::size_t k = 0; k < len; ++k) {
      r.items.push_back({order[k], static_cast<double>(len - k)});
      ranked.push_back(test[order[k]].rating);
      all.push_back(test[k].rating);
    }
    worst = std::max(worst, std::abs(ndcg_at_n(r, test, n) -
                                     oracle::naive_ndcg(ranked, all, n)));

    Ranking ideal;
    for (const auto& e : test) ideal.items.push_back({e.index, static_cast<double>(e.rating)});
    sort_ranking(ideal.items);
    if (ndcg_at_n(ideal, test, n) != 1.0) ++ideal_misses;
  }
  report(2, "NDCG oracle equivalence", worst < 1e-12 && ideal_misses == 0,
         "max |diff| = " + sci(worst) + ", ideal != 1 in " +
             std::to_string(ideal_misses) + " cases",
         seconds_since(start));
}

void factorization_recovery() {
  auto start = Clock::now();
  std::mt19937_64 gen(99);
  const std::size_t n = 30, dim = 5;
  std::vector<std::vector<double>> a, b;
  for (std::size_t i = 0; i < n; ++i) {
    a.push_back(oracle::random_vector(gen, dim));
    b.push_back(oracle::random_vector(gen, dim));
  }
  std::vector<PairTarget> targets;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) targets.push_back({i, j, dot(a[i], b[j])});
  }
  EmbeddingConfig cfg;
  cfg.dim = dim;
  cfg.learning_rate = 0.02;
  cfg.lr_decay = 0.995;
  cfg.epochs = 800;
  cfg.init_scale = 0.1;
  cfg.seed = 17;
  EmbeddingFit fit = factorize_targets(n, n, targets, cfg);
  const double rmse = std::sqrt(cost(fit.model, targets) / targets.size());
  const auto& trace = fit.trace.cost_per_epoch;
  const bool descends = trace.back() < trace.front();
  double secs = seconds_since(start);
  report(3, "Factorization recovery", rmse < 0.05 && descends && secs < 30.0,
         "RMSE = " + sci(rmse) + ", J first " + sci(trace.front()) + " -> last " +
             sci(trace.back()),
         secs);
}

void gradient_check_suite() {
  auto start = Clock::now();
  std::mt19937_64 gen(1004);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::size_t dim = 1 + gen() % 8, hidden = 1 + gen() % 10;
    Rng rng(gen());
    MlpModel m = init_mlp(dim, hidden, rng);
    for (double& v : m.b) v = rng.uniform(-0.5, 0.5);
    m.b_out = rng.uniform(-0.5, 0.5);
    auto u = oracle::random_vector(gen, dim);
    auto v = oracle::random_vector(gen, dim);
    TrainingExample ex{u, v, static_cast<double>(1 + gen() % 5) / 5.0};
    worst = std::max(worst, gradient_check(m, ex));
  }
  report(4, "MLP gradient check", worst < 1e-4,
         "max relative error = " + sci(worst) + " over 100 draws", seconds_since(start));
}

PipelineConfig movielens_config(std::size_t upl) {
  PipelineConfig cfg;
  cfg.split.upl = upl;
  cfg.repetitions = 5;
  cfg.seed = 20260101;
  return cfg;
}

std::string per_rep(const EvalReport& r, std::size_t col) {
  std::string s;
  for (const auto& rep : r.per_repetition) s += (s.empty() ? "" : " ") + fmt(rep[col]);
  return "[" + s + "]";
}

void movielens(const Dataset& d) {
  constexpr std::size_t kNdcg10 = 1;  // index into n_values {5, 10}

  auto start = Clock::now();
  PipelineConfig cfg = movielens_config(50);
  std::vector<Variant> variants{Variant::GemrankMlp, Variant::GemrankSimple};
  auto reports = evaluate_variants(d, cfg, variants);
  double secs = seconds_since(start);
  const EvalReport& mlp = reports[0];
  const EvalReport& simple = reports[1];
  report(5, "ML-100K item-based UPL=50 NDCG@10 >= 0.66", mlp.mean[kNdcg10] >= 0.66,
         "mean " + fmt(mlp.mean[kNdcg10]) + " +- " + fmt(mlp.stddev[kNdcg10]) +
             " per rep " + per_rep(mlp, kNdcg10),
         secs);
  const double gap = mlp.mean[kNdcg10] - simple.mean[kNdcg10];
  report(6, "MLP exceeds simple by >= 0.05 at UPL=50", gap >= 0.05,
         "mlp " + fmt(mlp.mean[kNdcg10]) + " vs simple " + fmt(simple.mean[kNdcg10]) +
             " (gap " + fmt(gap) + "), simple per rep " + per_rep(simple, kNdcg10),
         secs);

  start = Clock::now();
  PipelineConfig item_cfg = movielens_config(20);
  PipelineConfig user_cfg = item_cfg;
  user_cfg.basis = Basis::UserBased;
  EvalReport item = evaluate(d, item_cfg);
  EvalReport user = evaluate(d, user_cfg);
  const double basis_gap = item.mean[kNdcg10] - user.mean[kNdcg10];
  report(7, "Item-based exceeds user-based by >= 0.02 at UPL=20", basis_gap >= 0.02,
         "item " + fmt(item.mean[kNdcg10]) + " vs user " + fmt(user.mean[kNdcg10]) +
             " (gap " + fmt(basis_gap) + "), item per rep " + per_rep(item, kNdcg10) +
             ", user per rep " + per_rep(user, kNdcg10),
         seconds_since(start));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism(const fs::path& data) {
  auto start = Clock::now();
  const fs::path root = fs::temp_directory_path() / "gemrank_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  int exit_a = 0, exit_b = 0;
  // Both runs use the same output path, then get moved aside.
  for (const char* name : {"a", "b"}) {
    std::string cmd = std::string("\"") + GEMRANK_CLI_PATH + "\" run --data \"" +
                      data.string() + "\" --out \"" + (root / "run").string() +
                      "\" --threads 1 --repetitions 2 --seed 5"
                      " --set embedding.epochs=5 --set mlp.epochs=3 > /dev/null";
    int rc = std::system(cmd.c_str());
    (name[0] == 'a' ? exit_a : exit_b) = rc;
    if (rc == 0) fs::rename(root / "run", root / name);
  }
  std::size_t compared = 0, differing = 0;
  bool models_present = false;
  if (exit_a == 0 && exit_b == 0) {
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
      if (!entry.is_regular_file()) continue;
      fs::path rel = fs::relative(entry.path(), root / "a");
      models_present = models_present || rel.filename() == "mlp.model";
      ++compared;
      if (!fs::exists(root / "b" / rel) || slurp(entry.path()) != slurp(root / "b" / rel)) {
        ++differing;
      }
    }
  }
  const bool pass = exit_a == 0 && exit_b == 0 && compared > 0 && differing == 0 &&
                    models_present && fs::exists(root / "a/report.txt");
  report(8, "Determinism", pass,
         std::to_string(compared) + " files compared, " + std::to_string(differing) +
             " differ",
         seconds_since(start));
  fs::remove_all(root);
}

void property_suites() {
  auto start = Clock::now();
  const fs::path dir = GEMRANK_UNIT_TEST_DIR;
  std::vector<std::string> failed;
  int suites = 0;
  for (const char* bin : {"test_dataset", "test_pco", "test_embedding", "test_profiles",
                          "test_mlp", "test_ranking"}) {
    const fs::path log = fs::temp_directory_path() / (std::string(bin) + "_props.log");
    std::string cmd = "\"" + (dir / bin).string() +
                      "\" --test-case=\"property:*\" --no-colors > \"" + log.string() +
                      "\" 2>&1";
    int rc = std::system(cmd.c_str());
    std::string out = slurp(log);
    // doctest prints "test cases: N | N passed | 0 failed | ..."
    auto pos = out.find("test cases:");
    int ran = pos == std::string::npos ? 0 : std::atoi(out.c_str() + pos + 11);
    suites += ran;
    if (rc != 0 || ran == 0) failed.push_back(bin);
  }
  report(9, "Property suites (>= 200 cases each)", failed.empty(),
         std::to_string(suites) + " property suites run" +
             (failed.empty() ? "" : ", failing binaries:" + [&] {
               std::string s;
               for (auto& f : failed) s += " " + f;
               return s;
             }()),
         seconds_since(start));
}

}  // namespace

int main() {
  pco_oracle();
  ndcg_oracle();
  factorization_recovery();
  gradient_check_suite();

  const fs::path data = data_file();
  if (fs::exists(data)) {
    Dataset d = index_dataset(parse_ratings_file(data));
    std::cout << "dataset " << data.string() << ": " << d.ratings.size() << " ratings, "
              << d.num_users << " users, " << d.num_items << " items" << std::endl;
    movielens(d);
    determinism(data);
  } else {
    const std::string why = "dataset not found at " + data.string();
    report(5, "ML-100K item-based UPL=50 NDCG@10 >= 0.66", false, why, 0.0);
    report(6, "MLP exceeds simple by >= 0.05 at UPL=50", false, why, 0.0);
    report(7, "Item-based exceeds user-based by >= 0.02 at UPL=20", false, why, 0.0);
    report(8, "Determinism", false, why, 0.0);
  }
  property_suites();

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) +
                                                            " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
