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

#include "gemrank/embedding.hpp"

#include <cmath>
#include <string>

#include "gemrank/error.hpp"
#include "gemrank/rng.hpp"

namespace gemrank {

std::string_view to_string(Representation mode) {
  switch (mode) {
    case Representation::Target:
      return "target";
    case Representation::Context:
      return "context";
    case Representation::Sum:
      return "sum";
  }
  return "target";
}

Representation parse_representation(std::string_view text) {
  if (text == "target") return Representation::Target;
  if (text == "context") return Representation::Context;
  if (text == "sum") return Representation::Sum;
  throw ConfigError("unknown representation '" + std::string(text) + "'");
}

void validate(const EmbeddingConfig& config) {
  if (config.dim < 1) throw ConfigError("embedding.dim must be >= 1");
  if (!(config.learning_rate > 0.0)) {
    throw ConfigError("embedding.learning_rate must be > 0");
  }
  if (!(config.lr_decay > 0.0)) {
    throw ConfigError("embedding.lr_decay must be > 0");
  }
  if (config.epochs < 1) throw ConfigError("embedding.epochs must be >= 1");
  if (!(config.init_scale >= 0.0)) {
    throw ConfigError("embedding.init_scale must be >= 0");
  }
}

std::vector<PairTarget> pco_pair_targets(const PcoMatrix& pco, LogBase base) {
  std::vector<PairTarget> targets;
  targets.reserve(pco.stored_entries());
  for (std::size_t i = 0; i < pco.size(); ++i) {
    for (const auto& nb : pco.row(i)) {
      targets.push_back({static_cast<std::uint32_t>(i), nb.index,
                         smooth(static_cast<double>(nb.count), base)});
    }
  }
  return targets;
}

void pair_gradient(std::span<const double> v, std::span<const double> c,
                   double target, std::span<double> grad_v,
                   std::span<double> grad_c) {
  if (v.size() != c.size() || grad_v.size() != v.size() ||
      grad_c.size() != c.size()) {
    throw DimensionError("pair_gradient: vector sizes differ");
  }
  const double g = 2.0 * (dot(v, c) - target);
  for (std::size_t k = 0; k < v.size(); ++k) {
    grad_v[k] = g * c[k];
    grad_c[k] = g * v[k];
  }
}

namespace {

void init_uniform(Matrix& m, double scale, Rng& rng) {
  for (double& v : m.values()) v = rng.uniform(-scale, scale);
}

// In-place SGD step on one pair using the pair_gradient formula; returns the
// residual before the update.
inline double sgd_step(std::span<double> v, std::span<double> c, double target,
                       double lr) {
  const double residual = dot(v, c) - target;
  const double g = 2.0 * lr * residual;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double vk = v[k];
    v[k] -= g * c[k];
    c[k] -= g * vk;
  }
  return residual;
}

template <typename ExtraPairs>
EmbeddingFit run_sgd(std::size_t rows, std::size_t cols,
                     std::span<const PairTarget> targets,
                     const EmbeddingConfig& config, Basis basis,
                     ExtraPairs&& extra_pairs) {
  validate(config);
  Rng rng(config.seed);
  EmbeddingFit fit;
  fit.model.basis = basis;
  fit.model.target = Matrix(rows, config.dim);
  fit.model.context = Matrix(cols, config.dim);
  init_uniform(fit.model.target, config.init_scale, rng);
  init_uniform(fit.model.context, config.init_scale, rng);

  std::vector<PairTarget> epoch_pairs;
  double lr = config.learning_rate;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    epoch_pairs.assign(targets.begin(), targets.end());
    extra_pairs(epoch_pairs, rng);
    rng.shuffle(epoch_pairs);
    for (const PairTarget& p : epoch_pairs) {
      double r = sgd_step(fit.model.target.row(p.row),
                          fit.model.context.row(p.col), p.value, lr);
      if (!std::isfinite(r)) {
        throw TrainingError("embedding diverged at epoch " +
                            std::to_string(epoch));
      }
    }
    if (!fit.model.target.all_finite() || !fit.model.context.all_finite()) {
      throw TrainingError("embedding diverged at epoch " +
                          std::to_string(epoch));
    }
    double j = cost(fit.model, targets);
    if (!std::isfinite(j)) {
      throw TrainingError("embedding cost non-finite at epoch " +
                          std::to_string(epoch));
    }
    fit.trace.cost_per_epoch.push_back(j);
    lr *= config.lr_decay;
  }
  return fit;
}

}  // namespace

EmbeddingFit factorize_targets(std::size_t rows, std::size_t cols,
                               std::span<const PairTarget> targets,
                               const EmbeddingConfig& config, Basis basis) {
  for (const PairTarget& p : targets) {
    if (p.row >= rows || p.col >= cols) {
      throw DimensionError("pair target index out of range");
    }
  }
  return run_sgd(rows, cols, targets, config, basis,
                 [](std::vector<PairTarget>&, Rng&) {});
}

EmbeddingFit factorize_pco(const PcoMatrix& pco, const EmbeddingConfig& config) {
  if (pco.empty()) throw TrainingError("cannot factorize an empty PCO matrix");
  const auto targets = pco_pair_targets(pco, config.log_base);
  const std::size_t n = pco.size();
  const std::size_t samples = config.zero_pair_samples_per_entity;
  return run_sgd(n, n, targets, config, pco.basis(),
                 [&](std::vector<PairTarget>& pairs, Rng& rng) {
                   if (samples == 0 || n < 2) return;
                   for (std::uint32_t i = 0; i < n; ++i) {
                     for (std::size_t s = 0; s < samples; ++s) {
                       auto j = static_cast<std::uint32_t>(rng.below(n));
                       if (j != i && pco.count(i, j) == 0) {
                         pairs.push_back({i, j, 0.0});
                       }
                     }
                   }
                 });
}

double cost(const EmbeddingModel& model, std::span<const PairTarget> targets) {
  double total = 0.0;
  for (const PairTarget& p : targets) {
    const double r =
        dot(model.target.row(p.row), model.context.row(p.col)) - p.value;
    total += r * r;
  }
  return total;
}

double cost(const EmbeddingModel& model, const PcoMatrix& pco, LogBase base) {
  if (model.size() != pco.size() || model.context.rows() != pco.size()) {
    throw DimensionError("model has " + std::to_string(model.size()) +
                         " entities, PCO matrix has " +
                         std::to_string(pco.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pco.size(); ++i) {
    for (const auto& nb : pco.row(i)) {
      const double r = dot(model.target.row(i), model.context.row(nb.index)) -
                       smooth(static_cast<double>(nb.count), base);
      total += r * r;
    }
  }
  return total;
}

std::vector<double> entity_vector(const EmbeddingModel& model,
                                  std::size_t index, Representation mode) {
  if (index >= model.size()) {
    throw DimensionError("entity index " + std::to_string(index) +
                         " out of range (n = " + std::to_string(model.size()) +
                         ")");
  }
  auto t = model.target.row(index);
  auto c = model.context.row(index);
  switch (mode) {
    case Representation::Target:
      return {t.begin(), t.end()};
    case Representation::Context:
      return {c.begin(), c.end()};
    case Representation::Sum: {
      std::vector<double> out(t.size());
      for (std::size_t k = 0; k < t.size(); ++k) out[k] = t[k] + c[k];
      return out;
    }
  }
  return {};
}

Matrix representation_table(const EmbeddingModel& model, Representation mode) {
  Matrix table(model.size(), model.dim());
  for (std::size_t i = 0; i < model.size(); ++i) {
    auto v = entity_vector(model, i, mode);
    std::copy(v.begin(), v.end(), table.row(i).begin());
  }
  return table;
}

UserItemFactors factorize_user_item(const TrainTestSplit& split,
                                    const EmbeddingConfig& config) {
  const Dataset& train = split.train;
  for (std::uint32_t u : split.included_users) {
    if (u >= train.num_users || train.user_profiles[u].empty()) {
      throw Error("user-item factorization: included user " +
                  std::to_string(u) + " has no observed train entries");
    }
  }
  if (train.ratings.empty()) {
    throw Error("user-item factorization: no observed train entries");
  }
  std::vector<PairTarget> targets;
  targets.reserve(train.ratings.size());
  for (const Rating& r : train.ratings) {
    targets.push_back({r.user, r.item,
                       static_cast<double>(r.rating) / train.r_max});
  }
  EmbeddingFit fit = factorize_targets(train.num_users, train.num_items,
                                       targets, config, Basis::UserBased);
  return {std::move(fit.model.target), std::move(fit.model.context),
          std::move(fit.trace)};
}

}  // namespace gemrank
