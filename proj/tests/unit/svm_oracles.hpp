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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "aids/rng.hpp"
#include "aids/svm.hpp"

namespace aids::testing {

/// Kernel computed here rather than through kernel_eval.
inline double oracle_kernel(const Kernel& k, const std::vector<double>& a,
                            const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += k.type == KernelType::Linear ? a[i] * b[i] : (a[i] - b[i]) * (a[i] - b[i]);
  }
  return k.type == KernelType::Linear ? acc : std::exp(-k.gamma * acc);
}

/// W(alpha) = sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
inline double dual_objective(std::span<const LabeledVector> data, const Kernel& k,
                             std::span<const double> alpha) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    lin += alpha[i];
    for (std::size_t j = 0; j < data.size(); ++j) {
      quad += alpha[i] * alpha[j] * data[i].y * data[j].y * oracle_kernel(k, data[i].x, data[j].x);
    }
  }
  return lin - 0.5 * quad;
}

/// Best dual objective over feasible points of the grid {0, C/(m-1), ..., C}^n,
/// feasible meaning sum alpha_i y_i = 0. The level count m is the largest
/// with m^n <= budget (at least 2).
inline double grid_best_dual(std::span<const LabeledVector> data, const Kernel& k, double C,
                             double budget = 2e5) {
  const std::size_t n = data.size();
  std::size_t levels = 2;
  while (std::pow(static_cast<double>(levels + 1), static_cast<double>(n)) <= budget) ++levels;
  const double step = C / static_cast<double>(levels - 1);

  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) gram[i][j] = data[i].y * data[j].y * oracle_kernel(k, data[i].x, data[j].x);
  }
  std::vector<std::size_t> digit(n, 0);
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    long long balance = 0;  // sum of level * y in integer units
    for (std::size_t i = 0; i < n; ++i) balance += static_cast<long long>(digit[i]) * (data[i].y > 0 ? 1 : -1);
    if (balance == 0) {
      double lin = 0.0, quad = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double ai = step * static_cast<double>(digit[i]);
        lin += ai;
        for (std::size_t j = 0; j < n; ++j) quad += ai * step * static_cast<double>(digit[j]) * gram[i][j];
      }
      best = std::max(best, lin - 0.5 * quad);
    }
    std::size_t pos = 0;
    while (pos < n && ++digit[pos] == levels) digit[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

/// Largest KKT violation of a dual solution, measured on y_i f(x_i).
inline double max_kkt_residual(std::span<const LabeledVector> data, const Kernel& k,
                               std::span<const double> alpha, double bias, double C) {
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double f = bias;
    for (std::size_t j = 0; j < data.size(); ++j) {
      f += alpha[j] * data[j].y * oracle_kernel(k, data[j].x, data[i].x);
    }
    const double m = data[i].y * f;
    double r;
    if (alpha[i] <= 0.0) {
      r = std::max(0.0, 1.0 - m);
    } else if (alpha[i] >= C) {
      r = std::max(0.0, m - 1.0);
    } else {
      r = std::abs(m - 1.0);
    }
    worst = std::max(worst, r);
  }
  return worst;
}

/// Random 2-D two-class dataset with n points, both classes present.
inline std::vector<LabeledVector> random_small_dataset(Rng& rng, std::size_t n) {
  std::vector<LabeledVector> d;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = i == 0 ? 1.0 : (i == 1 ? -1.0 : (rng.bernoulli(0.5) ? 1.0 : -1.0));
    d.push_back({{rng.uniform(-1, 1) + 0.5 * y, rng.uniform(-1, 1)}, y});
  }
  return d;
}

}  // namespace aids::testing
