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

#include <vector>

namespace aids {

/// A training example: input vector and scalar target. MLP targets are
/// 0 (normal) / 1 (attack); SVM targets are -1 / +1.
struct LabeledVector {
  std::vector<double> x;
  double y = 0.0;

  bool operator==(const LabeledVector&) const = default;
};

}  // namespace aids
