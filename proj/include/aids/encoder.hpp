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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "aids/dataset.hpp"

namespace aids {

/// Fixed-width numeric form of a record; every component lies in [0,1].
using EncodedVector = std::vector<double>;

/// Min-max scaling for the 38 numeric features plus one-hot blocks for the
/// three symbolic ones. Layout: [38 scaled numerics][protocol][service][flag],
/// each one-hot block ending in a reserved slot for symbols unseen at fit time.
class EncoderModel {
 public:
  using Vocabulary = std::vector<std::string>;

  EncoderModel() = default;

  /// Vocabularies in first-seen order; min/max over the collection.
  /// Throws EmptyDataset on an empty collection.
  static EncoderModel fit(std::span<const ConnectionRecord> records);

  /// Rebuilds a fitted model from its parts (deserialization).
  static EncoderModel from_parts(std::array<Vocabulary, kNumSymbolic> vocabularies,
                                 std::array<double, kNumContinuous> mins,
                                 std::array<double, kNumContinuous> maxs);

  EncodedVector encode(const ConnectionRecord& record) const;
  void encode_into(const ConnectionRecord& record, std::span<double> out) const;

  std::size_t encoded_width() const { return width_; }
  /// Start offset of symbolic block k in the encoded vector.
  std::size_t block_offset(std::size_t k) const { return offsets_[k]; }
  /// Width of block k, including the unknown slot.
  std::size_t block_width(std::size_t k) const { return vocab_[k].size() + 1; }

  const std::array<Vocabulary, kNumSymbolic>& vocabularies() const { return vocab_; }
  const std::array<double, kNumContinuous>& mins() const { return min_; }
  const std::array<double, kNumContinuous>& maxs() const { return max_; }

  bool operator==(const EncoderModel& other) const {
    return vocab_ == other.vocab_ && min_ == other.min_ && max_ == other.max_;
  }

 private:
  void finalize();

  std::array<Vocabulary, kNumSymbolic> vocab_;
  std::array<double, kNumContinuous> min_{};
  std::array<double, kNumContinuous> max_{};
  std::array<std::size_t, kNumSymbolic> offsets_{};
  std::size_t width_ = 0;
};

}  // namespace aids
