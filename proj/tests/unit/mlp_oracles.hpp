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
#include <vector>

#include "aids/mlp.hpp"

namespace aids::testing {

/// Central differences of the batch MSE, one parameter at a time. Only
/// uses forward evaluation, never the backprop path.
inline Eigen::VectorXd finite_difference_gradient(const MlpNetwork& net,
                                                  std::span<const LabeledVector> batch,
                                                  double h) {
  const Eigen::VectorXd theta = net.parameters();
  Eigen::VectorXd g(theta.size());
  MlpNetwork probe = net;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd t = theta;
    t(k) = theta(k) + h;
    probe.set_parameters(t);
    double plus = 0.0;
    for (const auto& ex : batch) plus += std::pow(forward(probe, ex.x) - ex.y, 2);
    t(k) = theta(k) - h;
    probe.set_parameters(t);
    double minus = 0.0;
    for (const auto& ex : batch) minus += std::pow(forward(probe, ex.x) - ex.y, 2);
    g(k) = (plus - minus) / (2.0 * h * static_cast<double>(batch.size()));
  }
  return g;
}

/// max_k |a_k - b_k| / max(|a_k|, |b_k|, 1e-6). The floor keeps components
/// that are zero up to rounding from dominating.
inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double denom = std::max({std::abs(a(k)), std::abs(b(k)), 1e-6});
    worst = std::max(worst, std::abs(a(k) - b(k)) / denom);
  }
  return worst;
}

inline std::vector<LabeledVector> xor_data() {
  return {{{0, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 0}};
}

/// y = x^2 on 20 evenly spaced points of [-1, 1].
inline std::vector<LabeledVector> square_data() {
  std::vector<LabeledVector> d;
  for (int i = 0; i < 20; ++i) {
    const double x = -1.0 + 2.0 * i / 19.0;
    d.push_back({{x}, x * x});
  }
  return d;
}

}  // namespace aids::testing
