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

#ifndef GEMRANK_MLP_HPP_
#define GEMRANK_MLP_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "gemrank/matrix.hpp"
#include "gemrank/rng.hpp"

namespace gemrank {

enum class Loss { CrossEntropy, SquaredError };

std::string_view to_string(Loss loss);
Loss parse_loss(std::string_view text);

struct MlpConfig {
  std::vector<std::size_t> hidden_candidates{5, 10, 15, 20, 25};
  double dropout_rate = 0.5;
  double learning_rate = 0.01;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double validation_fraction = 0.05;
  Loss loss = Loss::CrossEntropy;
  // Train on z-scored inputs, then fold the affine map back into w and b so
  // the returned model still takes raw vectors.
  bool standardize_inputs = true;
  std::uint64_t seed = 0;
};

void validate(const MlpConfig& config);

// sigmoid(w_out . relu(w [u; v] + b) + b_out)
struct MlpModel {
  Matrix w;                   // hidden x (2 * dim)
  std::vector<double> b;      // hidden
  std::vector<double> w_out;  // hidden
  double b_out = 0.0;

  std::size_t hidden() const { return w.rows(); }
  std::size_t input_dim() const { return w.cols(); }
  std::size_t dim() const { return w.cols() / 2; }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

// Glorot-uniform weights, zero biases.
// Inverted dropout for one hidden activation: zero with probability `rate`,
// otherwise scaled by 1 / (1 - rate). Draws nothing when rate is 0.
double apply_dropout(double activation, double rate, Rng& rng);

MlpModel init_mlp(std::size_t dim, std::size_t hidden, Rng& rng);

// The spans must outlive the example.
struct TrainingExample {
  std::span<const double> user;
  std::span<const double> item;
  double interest = 0.0;  // rating / r_max
};

// Pre-sigmoid output. Throws DimensionError on size mismatch.
double output_logit(const MlpModel& model, std::span<const double> user,
                    std::span<const double> item);

// Interest probability in (0, 1); dropout is never applied here.
double forward(const MlpModel& model, std::span<const double> user,
               std::span<const double> item);

double example_loss(const MlpModel& model, const TrainingExample& example,
                    Loss loss);

// Parameter-shaped container for gradients.
struct MlpGradients {
  Matrix w;
  std::vector<double> b;
  std::vector<double> w_out;
  double b_out = 0.0;
};

MlpGradients loss_gradients(const MlpModel& model,
                            const TrainingExample& example, Loss loss);

// Largest relative difference between analytic gradients and central finite
// differences (step `step`) over all parameters. Pairs whose magnitudes are
// both below 1e-8 are compared absolutely.
double gradient_check(const MlpModel& model, const TrainingExample& example,
                      Loss loss = Loss::CrossEntropy, double step = 1e-5);

struct CandidateResult {
  std::size_t hidden = 0;
  double validation_loss = 0.0;
  double first_epoch_train_loss = 0.0;
  double final_train_loss = 0.0;
};

struct SelectionReport {
  std::vector<CandidateResult> candidates;
  std::size_t chosen_hidden = 0;
  std::size_t train_examples = 0;
  std::size_t validation_examples = 0;
};

struct MlpFit {
  MlpModel model;
  SelectionReport report;
};

// Trains one model per hidden size on the non-validation examples
// (mini-batch SGD, inverted dropout on the hidden layer) and keeps the one
// with the lowest mean validation loss. Throws TrainingError on a
// non-finite loss.
MlpFit train_mlp(std::span<const TrainingExample> examples,
                 const MlpConfig& config, std::size_t dim);

// Model file: "dim hidden", one line per W row, then b, w_out and b_out.
void write_mlp(std::ostream& out, const MlpModel& model);
MlpModel read_mlp(std::istream& in);
void write_mlp_file(const std::filesystem::path& path, const MlpModel& model);
MlpModel read_mlp_file(const std::filesystem::path& path);

}  // namespace gemrank

#endif  // GEMRANK_MLP_HPP_
