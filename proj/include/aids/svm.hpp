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
#include <vector>

#include "aids/labeled_vector.hpp"

namespace aids {

enum class KernelType { Linear, Rbf };

struct Kernel {
  KernelType type = KernelType::Rbf;
  double gamma = 1.0;  // Rbf only; must be > 0

  static Kernel linear() { return {KernelType::Linear, 0.0}; }
  static Kernel rbf(double gamma) { return {KernelType::Rbf, gamma}; }

  bool operator==(const Kernel&) const = default;
};

/// Linear: <x,z>. Rbf: exp(-gamma * |x-z|^2). Throws DimensionError.
double kernel_eval(const Kernel& kernel, std::span<const double> x, std::span<const double> z);

struct SmoConfig {
  double C = 1.0;
  double tolerance = 1e-3;
  std::size_t max_passes = 10;
  std::uint64_t seed = 0;
  Kernel kernel = Kernel::rbf(1.0);
  /// Cap on successful pair updates; 0 picks max(100000, 200 * n).
  std::size_t max_iterations = 0;
  /// Up to this many examples the whole Gram matrix is precomputed.
  std::size_t full_gram_limit = 4000;

  void validate() const;
};

/// Dual solution over the training set, before zero multipliers are dropped.
struct SmoSolution {
  std::vector<double> alphas;
  double bias = 0.0;
  std::size_t iterations = 0;
  std::size_t passes = 0;
};

/// C-SVC dual solved by sequential minimal optimization. Targets must be
/// -1 or +1. Throws EmptyDataset, DegenerateLabels, DimensionError.
SmoSolution smo_solve(std::span<const LabeledVector> data, const SmoConfig& config);

struct SvmModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> coefficients;  // alpha_i * y_i
  double bias = 0.0;
  Kernel kernel;
  double C = 1.0;

  std::size_t input_width() const {
    return support_vectors.empty() ? 0 : support_vectors.front().size();
  }
  bool operator==(const SvmModel&) const = default;
};

/// smo_solve, then keeps the examples with alpha > 0.
SvmModel smo_train(std::span<const LabeledVector> data, const SmoConfig& config);

/// sum_i coef_i * K(sv_i, x) + b.
double decision_value(const SvmModel& model, std::span<const double> x);

/// +1 (attack) when decision_value >= 0, else -1.
int predict_sign(const SvmModel& model, std::span<const double> x);

}  // namespace aids
