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

#include "gemrank/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "gemrank/error.hpp"
#include "gemrank/text_io.hpp"

namespace gemrank {

std::string_view to_string(Loss loss) {
  return loss == Loss::CrossEntropy ? "cross-entropy" : "squared-error";
}

Loss parse_loss(std::string_view text) {
  if (text == "cross-entropy" || text == "crossentropy" || text == "bce") {
    return Loss::CrossEntropy;
  }
  if (text == "squared-error" || text == "mse") return Loss::SquaredError;
  throw ConfigError("unknown loss '" + std::string(text) + "'");
}

void validate(const MlpConfig& config) {
  if (config.hidden_candidates.empty()) {
    throw ConfigError("mlp.hidden_candidates must not be empty");
  }
  for (std::size_t h : config.hidden_candidates) {
    if (h < 1) throw ConfigError("hidden sizes must be >= 1");
  }
  if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0)) {
    throw ConfigError("mlp.dropout must be in [0, 1)");
  }
  if (!(config.learning_rate > 0.0)) {
    throw ConfigError("mlp.learning_rate must be > 0");
  }
  if (config.epochs < 1) throw ConfigError("mlp.epochs must be >= 1");
  if (config.batch_size < 1) throw ConfigError("mlp.batch_size must be >= 1");
  if (!(config.validation_fraction > 0.0 && config.validation_fraction < 1.0)) {
    throw ConfigError("mlp.validation_fraction must be in (0, 1)");
  }
}

double apply_dropout(double activation, double rate, Rng& rng) {
  if (rate == 0.0) return activation;
  return rng.bernoulli(1.0 - rate) ? activation / (1.0 - rate) : 0.0;
}

MlpModel init_mlp(std::size_t dim, std::size_t hidden, Rng& rng) {
  MlpModel m;
  m.w = Matrix(hidden, 2 * dim);
  m.b.assign(hidden, 0.0);
  m.w_out.assign(hidden, 0.0);
  const double a = std::sqrt(6.0 / static_cast<double>(2 * dim + hidden));
  for (double& x : m.w.values()) x = rng.uniform(-a, a);
  const double a_out = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  for (double& x : m.w_out) x = rng.uniform(-a_out, a_out);
  return m;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double loss_from_logit(double z, double target, Loss loss) {
  if (loss == Loss::CrossEntropy) return softplus(z) - target * z;
  const double d = sigmoid(z) - target;
  return d * d;
}

// dL/dz
double logit_gradient(double z, double target, Loss loss) {
  const double p = sigmoid(z);
  if (loss == Loss::CrossEntropy) return p - target;
  return 2.0 * (p - target) * p * (1.0 - p);
}

void check_dims(const MlpModel& model, std::span<const double> user,
                std::span<const double> item) {
  if (user.size() + item.size() != model.input_dim() ||
      user.size() != item.size()) {
    throw DimensionError("mlp expects two vectors of size " +
                         std::to_string(model.dim()) + ", got " +
                         std::to_string(user.size()) + " and " +
                         std::to_string(item.size()));
  }
}

// w_row . [u; v]
inline double row_dot(std::span<const double> w_row,
                      std::span<const double> user,
                      std::span<const double> item) {
  const std::size_t d = user.size();
  return dot(w_row.first(d), user) + dot(w_row.subspan(d), item);
}

}  // namespace

double output_logit(const MlpModel& model, std::span<const double> user,
                    std::span<const double> item) {
  check_dims(model, user, item);
  double z = model.b_out;
  for (std::size_t h = 0; h < model.hidden(); ++h) {
    const double pre = row_dot(model.w.row(h), user, item) + model.b[h];
    if (pre > 0.0) z += model.w_out[h] * pre;
  }
  return z;
}

double forward(const MlpModel& model, std::span<const double> user,
               std::span<const double> item) {
  return sigmoid(output_logit(model, user, item));
}

double example_loss(const MlpModel& model, const TrainingExample& example,
                    Loss loss) {
  return loss_from_logit(output_logit(model, example.user, example.item),
                         example.interest, loss);
}

MlpGradients loss_gradients(const MlpModel& model,
                            const TrainingExample& example, Loss loss) {
  check_dims(model, example.user, example.item);
  const std::size_t hidden = model.hidden();
  const std::size_t d = example.user.size();
  std::vector<double> pre(hidden);
  double z = model.b_out;
  for (std::size_t h = 0; h < hidden; ++h) {
    pre[h] = row_dot(model.w.row(h), example.user, example.item) + model.b[h];
    if (pre[h] > 0.0) z += model.w_out[h] * pre[h];
  }
  const double dz = logit_gradient(z, example.interest, loss);
  MlpGradients g;
  g.w = Matrix(hidden, model.input_dim());
  g.b.assign(hidden, 0.0);
  g.w_out.assign(hidden, 0.0);
  g.b_out = dz;
  for (std::size_t h = 0; h < hidden; ++h) {
    if (pre[h] <= 0.0) continue;
    g.w_out[h] = dz * pre[h];
    const double da = dz * model.w_out[h];
    g.b[h] = da;
    auto row = g.w.row(h);
    for (std::size_t k = 0; k < d; ++k) {
      row[k] = da * example.user[k];
      row[d + k] = da * example.item[k];
    }
  }
  return g;
}

namespace {

// Loss evaluated in extended precision so that the finite differences below
// are not dominated by cancellation when a gradient is tiny.
long double probe_loss(const MlpModel& model, const TrainingExample& example,
                       Loss loss) {
  const std::size_t d = example.user.size();
  long double z = model.b_out;
  for (std::size_t h = 0; h < model.hidden(); ++h) {
    auto row = model.w.row(h);
    long double pre = model.b[h];
    for (std::size_t k = 0; k < d; ++k) {
      pre += static_cast<long double>(row[k]) * example.user[k];
      pre += static_cast<long double>(row[d + k]) * example.item[k];
    }
    if (pre > 0.0L) z += model.w_out[h] * pre;
  }
  if (loss == Loss::CrossEntropy) {
    return std::max(z, 0.0L) + std::log1p(std::exp(-std::abs(z))) -
           example.interest * z;
  }
  const long double p = 1.0L / (1.0L + std::exp(-z));
  return (p - example.interest) * (p - example.interest);
}

}  // namespace

double gradient_check(const MlpModel& model, const TrainingExample& example,
                      Loss loss, double step) {
  const MlpGradients analytic = loss_gradients(model, example, loss);
  MlpModel probe = model;
  double worst = 0.0;
  auto compare = [&](double& param, double grad) {
    const double saved = param;
    param = saved + step;
    const long double up = probe_loss(probe, example, loss);
    const long double actual_up = param - saved;
    param = saved - step;
    const long double down = probe_loss(probe, example, loss);
    const long double actual_down = saved - param;
    param = saved;
    const double numeric =
        static_cast<double>((up - down) / (actual_up + actual_down));
    const double scale = std::max(std::abs(grad), std::abs(numeric));
    const double diff = std::abs(grad - numeric);
    worst = std::max(worst, scale < 1e-8 ? diff : diff / scale);
  };
  for (std::size_t h = 0; h < probe.hidden(); ++h) {
    for (std::size_t k = 0; k < probe.input_dim(); ++k) {
      compare(probe.w(h, k), analytic.w(h, k));
    }
    compare(probe.b[h], analytic.b[h]);
    compare(probe.w_out[h], analytic.w_out[h]);
  }
  compare(probe.b_out, analytic.b_out);
  return worst;
}

namespace {

double mean_loss(const MlpModel& model,
                 std::span<const TrainingExample> examples,
                 std::span<const std::size_t> indices, Loss loss) {
  if (indices.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i : indices) total += example_loss(model, examples[i], loss);
  return total / static_cast<double>(indices.size());
}

struct CandidateRun {
  MlpModel model;
  CandidateResult result;
};

CandidateRun train_candidate(std::span<const TrainingExample> examples,
                             std::vector<std::size_t> train_idx,
                             std::span<const std::size_t> valid_idx,
                             std::size_t dim, std::size_t hidden,
                             const MlpConfig& config) {
  Rng rng(derive_seed(config.seed, "mlp/hidden=" + std::to_string(hidden)));
  MlpModel m = init_mlp(dim, hidden, rng);
  const std::size_t in = 2 * dim;
  const double keep = 1.0 - config.dropout_rate;
  const double scale = 1.0 / keep;

  Matrix gw(hidden, in);
  std::vector<double> gb(hidden), gw_out(hidden), pre(hidden), act(hidden);
  CandidateRun run;
  run.result.hidden = hidden;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(train_idx);
    for (std::size_t start = 0; start < train_idx.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(train_idx.size(), start + config.batch_size);
      std::fill(gw.values().begin(), gw.values().end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      std::fill(gw_out.begin(), gw_out.end(), 0.0);
      double gb_out = 0.0;
      double batch_loss = 0.0;
      for (std::size_t p = start; p < end; ++p) {
        const TrainingExample& ex = examples[train_idx[p]];
        double z = m.b_out;
        for (std::size_t h = 0; h < hidden; ++h) {
          pre[h] = row_dot(m.w.row(h), ex.user, ex.item) + m.b[h];
          act[h] = apply_dropout(std::max(pre[h], 0.0), config.dropout_rate, rng);
          z += m.w_out[h] * act[h];
        }
        batch_loss += loss_from_logit(z, ex.interest, config.loss);
        const double dz = logit_gradient(z, ex.interest, config.loss);
        gb_out += dz;
        for (std::size_t h = 0; h < hidden; ++h) {
          if (act[h] == 0.0) continue;
          gw_out[h] += dz * act[h];
          // d act / d pre = scale on kept, active units.
          const double da = dz * m.w_out[h] * scale;
          gb[h] += da;
          auto row = gw.row(h);
          for (std::size_t k = 0; k < dim; ++k) {
            row[k] += da * ex.user[k];
            row[dim + k] += da * ex.item[k];
          }
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("mlp loss non-finite at epoch " +
                            std::to_string(epoch) + " (hidden " +
                            std::to_string(hidden) + ")");
      }
      const double step = config.learning_rate / static_cast<double>(end - start);
      auto wv = m.w.values();
      auto gv = gw.values();
      for (std::size_t k = 0; k < wv.size(); ++k) wv[k] -= step * gv[k];
      for (std::size_t h = 0; h < hidden; ++h) {
        m.b[h] -= step * gb[h];
        m.w_out[h] -= step * gw_out[h];
      }
      m.b_out -= step * gb_out;
    }
    if (epoch == 1 || epoch == config.epochs) {
      const double train_loss = mean_loss(m, examples, train_idx, config.loss);
      if (!std::isfinite(train_loss)) {
        throw TrainingError("mlp loss non-finite at epoch " +
                            std::to_string(epoch) + " (hidden " +
                            std::to_string(hidden) + ")");
      }
      if (epoch == 1) run.result.first_epoch_train_loss = train_loss;
      if (epoch == config.epochs) run.result.final_train_loss = train_loss;
    }
  }
  run.result.validation_loss = mean_loss(m, examples, valid_idx, config.loss);
  run.model = std::move(m);
  return run;
}

}  // namespace

MlpFit train_mlp(std::span<const TrainingExample> examples,
                 const MlpConfig& config, std::size_t dim) {
  validate(config);
  if (examples.empty()) throw TrainingError("mlp: no training examples");
  for (const auto& ex : examples) {
    if (ex.user.size() != dim || ex.item.size() != dim) {
      throw DimensionError("mlp: training example vectors must have size " +
                           std::to_string(dim));
    }
  }
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(derive_seed(config.seed, "mlp/validation"));
  split_rng.shuffle(order);
  std::size_t n_valid = static_cast<std::size_t>(
      std::llround(config.validation_fraction * static_cast<double>(order.size())));
  n_valid = std::clamp<std::size_t>(n_valid, 1, order.size() - (order.size() > 1));
  if (order.size() == 1) n_valid = 0;
  std::vector<std::size_t> valid_idx(order.begin(), order.begin() + n_valid);
  std::vector<std::size_t> train_idx(order.begin() + n_valid, order.end());
  // Restore index order; the per-epoch shuffle supplies the randomness.
  std::sort(valid_idx.begin(), valid_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  // Per-feature statistics over the training portion only.
  std::vector<double> mean(2 * dim, 0.0), scale(2 * dim, 1.0), storage;
  std::vector<TrainingExample> scaled;
  if (config.standardize_inputs && !train_idx.empty()) {
    auto features = [&](const TrainingExample& ex, std::size_t k) {
      return k < dim ? ex.user[k] : ex.item[k - dim];
    };
    std::vector<double> ss(2 * dim, 0.0);
    for (std::size_t i : train_idx) {
      for (std::size_t k = 0; k < 2 * dim; ++k) mean[k] += features(examples[i], k);
    }
    for (double& m : mean) m /= static_cast<double>(train_idx.size());
    for (std::size_t i : train_idx) {
      for (std::size_t k = 0; k < 2 * dim; ++k) {
        const double d = features(examples[i], k) - mean[k];
        ss[k] += d * d;
      }
    }
    for (std::size_t k = 0; k < 2 * dim; ++k) {
      const double sd = std::sqrt(ss[k] / static_cast<double>(train_idx.size()));
      scale[k] = sd > 1e-12 ? sd : 1.0;
    }
    storage.resize(examples.size() * 2 * dim);
    scaled.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      double* row = storage.data() + i * 2 * dim;
      for (std::size_t k = 0; k < 2 * dim; ++k) {
        row[k] = (features(examples[i], k) - mean[k]) / scale[k];
      }
      scaled.push_back({std::span<const double>(row, dim),
                        std::span<const double>(row + dim, dim),
                        examples[i].interest});
    }
    examples = scaled;
  }

  MlpFit fit;
  fit.report.train_examples = train_idx.size();
  fit.report.validation_examples = valid_idx.size();
  bool have_best = false;
  double best_loss = 0.0;
  for (std::size_t hidden : config.hidden_candidates) {
    CandidateRun run =
        train_candidate(examples, train_idx, valid_idx, dim, hidden, config);
    fit.report.candidates.push_back(run.result);
    if (!have_best || run.result.validation_loss < best_loss) {
      have_best = true;
      best_loss = run.result.validation_loss;
      fit.model = std::move(run.model);
      fit.report.chosen_hidden = hidden;
    }
  }
  if (!scaled.empty()) {
    // w (x - mean) / scale + b  ==  (w / scale) x + (b - (w / scale) . mean)
    for (std::size_t h = 0; h < fit.model.hidden(); ++h) {
      auto row = fit.model.w.row(h);
      for (std::size_t k = 0; k < row.size(); ++k) {
        row[k] /= scale[k];
        fit.model.b[h] -= row[k] * mean[k];
      }
    }
  }
  return fit;
}

void write_mlp(std::ostream& out, const MlpModel& model) {
  out << model.dim() << ' ' << model.hidden() << '\n';
  auto write_row = [&out](std::span<const double> values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (k) out << ' ';
      out << format_double(values[k]);
    }
    out << '\n';
  };
  for (std::size_t h = 0; h < model.hidden(); ++h) write_row(model.w.row(h));
  write_row(model.b);
  write_row(model.w_out);
  out << format_double(model.b_out) << '\n';
}

MlpModel read_mlp(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_values = [&](std::size_t expected) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError(line_no, "truncated model");
    auto fields = split_whitespace(strip_cr(line));
    if (fields.size() != expected) {
      throw ParseError(line_no, "expected " + std::to_string(expected) +
                                    " values, got " +
                                    std::to_string(fields.size()));
    }
    std::vector<double> values(expected);
    for (std::size_t k = 0; k < expected; ++k) {
      if (!parse_double(fields[k], values[k])) {
        throw ParseError(line_no, "non-numeric model value");
      }
    }
    return values;
  };
  auto header = next_values(2);
  const auto dim = static_cast<std::size_t>(header[0]);
  const auto hidden = static_cast<std::size_t>(header[1]);
  if (dim < 1 || hidden < 1 || header[0] != static_cast<double>(dim) ||
      header[1] != static_cast<double>(hidden)) {
    throw ParseError(1, "invalid model header");
  }
  MlpModel m;
  m.w = Matrix(hidden, 2 * dim);
  for (std::size_t h = 0; h < hidden; ++h) {
    auto row = next_values(2 * dim);
    std::copy(row.begin(), row.end(), m.w.row(h).begin());
  }
  m.b = next_values(hidden);
  m.w_out = next_values(hidden);
  m.b_out = next_values(1)[0];
  return m;
}

void write_mlp_file(const std::filesystem::path& path, const MlpModel& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_mlp(out, model);
}

MlpModel read_mlp_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return read_mlp(in);
}

}  // namespace gemrank
