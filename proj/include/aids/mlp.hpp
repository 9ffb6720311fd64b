/*
 * Copyright 2026 The AIDS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aids/labeled_vector.hpp"

namespace aids {

/// Fully connected feedforward network with logistic units on every layer
/// and a single output. Parameters flatten layer by layer as W (row-major,
/// one row per unit) followed by b.
class MlpNetwork {
 public:
  MlpNetwork() = default;

  /// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
  /// Throws InvalidArchitecture unless sizes = {input, hidden..., 1}, all >= 1.
  static MlpNetwork init(std::vector<std::size_t> layer_sizes, std::uint64_t seed);
  static MlpNetwork zeros(std::vector<std::size_t> layer_sizes);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t input_width() const { return sizes_.front(); }
  std::size_t layer_count() const { return weights_.size(); }
  std::size_t parameter_count() const;

  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);

  const Eigen::MatrixXd& weights(std::size_t layer) const { return weights_[layer]; }
  const Eigen::VectorXd& biases(std::size_t layer) const { return biases_[layer]; }
  Eigen::MatrixXd& weights(std::size_t layer) { return weights_[layer]; }
  Eigen::VectorXd& biases(std::size_t layer) { return biases_[layer]; }

  bool all_finite() const;
  bool operator==(const MlpNetwork& other) const;

 private:
  static void validate(const std::vector<std::size_t>& sizes);

  std::vector<std::size_t> sizes_;
  std::vector<Eigen::MatrixXd> weights_;  // weights_[l] is sizes_[l+1] x sizes_[l]
  std::vector<Eigen::VectorXd> biases_;
};

/// Parameter count for a layer-size list, without building a network.
std::size_t count_parameters(std::span<const std::size_t> layer_sizes);

/// Output Y in (0,1). Throws DimensionError on width mismatch.
double forward(const MlpNetwork& net, std::span<const double> x);

/// Mean squared error over a batch.
double mse(const MlpNetwork& net, std::span<const LabeledVector> batch);

/// Exact gradient of the batch MSE w.r.t. the flattened parameters.
/// Throws EmptyBatch / DimensionError.
Eigen::VectorXd gradient(const MlpNetwork& net, std::span<const LabeledVector> batch);

/// d(output)/d(parameters) for every example: a |batch| x P matrix.
Eigen::MatrixXd output_jacobian(const MlpNetwork& net, std::span<const LabeledVector> batch);

struct RpropConfig {
  double delta0 = 0.1;
  double eta_plus = 1.2;
  double eta_minus = 0.5;
  double delta_max = 50.0;
  double delta_min = 1e-6;
  std::size_t max_epochs = 1000;
  double target_mse = 0.0;

  void validate() const;
};

struct LmConfig {
  double lambda0 = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  std::size_t max_epochs = 1000;
  double target_mse = 0.0;
  std::size_t max_parameters = 5000;
  /// Escalation bound: an epoch gives up once lambda would exceed this.
  double lambda_max = 1e10;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  /// Training MSE at the start of the epoch, before its update.
  double mse = 0.0;
  /// Rprop: largest per-parameter step magnitude applied this epoch.
  double max_step = 0.0;
  /// LM: every damping value tried this epoch, in order; the last one was
  /// accepted unless the epoch ended the run.
  std::vector<double> lambdas;
};

struct TrainResult {
  MlpNetwork net;
  std::vector<EpochRecord> log;
  double final_mse = 0.0;
  std::string stop_reason;  // "target", "max_epochs", "lambda_limit"
};

/// iRprop- full-batch training.
TrainResult train_rprop(MlpNetwork net, std::span<const LabeledVector> data,
                        const RpropConfig& config);

/// Levenberg-Marquardt on the sum of squared residuals, damping lambda*I.
/// Throws ModelTooLarge above config.max_parameters and NumericalFailure if
/// no damped system in an epoch could be factorized.
TrainResult train_lm(MlpNetwork net, std::span<const LabeledVector> data,
                     const LmConfig& config);

}  // namespace aids
