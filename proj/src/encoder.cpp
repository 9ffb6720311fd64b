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

#include "aids/encoder.hpp"

#include <algorithm>
#include <unordered_map>

#include "aids/errors.hpp"

namespace aids {

EncoderModel EncoderModel::fit(std::span<const ConnectionRecord> records) {
  if (records.empty()) throw EmptyDataset("cannot fit an encoder on zero records");
  EncoderModel m;
  m.min_ = records.front().continuous;
  m.max_ = records.front().continuous;

  std::array<std::unordered_map<std::string, std::size_t>, kNumSymbolic> seen;
  for (const auto& r : records) {
    for (std::size_t i = 0; i < kNumContinuous; ++i) {
      m.min_[i] = std::min(m.min_[i], r.continuous[i]);
      m.max_[i] = std::max(m.max_[i], r.continuous[i]);
    }
    for (std::size_t k = 0; k < kNumSymbolic; ++k) {
      const auto& s = r.symbol(k);
      if (seen[k].try_emplace(s, m.vocab_[k].size()).second) m.vocab_[k].push_back(s);
    }
  }
  m.finalize();
  return m;
}

EncoderModel EncoderModel::from_parts(std::array<Vocabulary, kNumSymbolic> vocabularies,
                                      std::array<double, kNumContinuous> mins,
                                      std::array<double, kNumContinuous> maxs) {
  EncoderModel m;
  m.vocab_ = std::move(vocabularies);
  m.min_ = mins;
  m.max_ = maxs;
  m.finalize();
  return m;
}

void EncoderModel::finalize() {
  std::size_t offset = kNumContinuous;
  for (std::size_t k = 0; k < kNumSymbolic; ++k) {
    offsets_[k] = offset;
    offset += vocab_[k].size() + 1;
  }
  width_ = offset;
}

void EncoderModel::encode_into(const ConnectionRecord& record, std::span<double> out) const {
  if (out.size() != width_) throw DimensionError("encode_into: output width mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < kNumContinuous; ++i) {
    const double span = max_[i] - min_[i];
    if (span <= 0.0) continue;  // constant at fit time
    out[i] = std::clamp((record.continuous[i] - min_[i]) / span, 0.0, 1.0);
  }
  for (std::size_t k = 0; k < kNumSymbolic; ++k) {
    const auto& vocab = vocab_[k];
    const auto it = std::find(vocab.begin(), vocab.end(), record.symbol(k));
    const auto pos = static_cast<std::size_t>(it - vocab.begin());  // == size() -> unknown slot
    out[offsets_[k] + pos] = 1.0;
  }
}

EncodedVector EncoderModel::encode(const ConnectionRecord& record) const {
  EncodedVector v(width_);
  encode_into(record, v);
  return v;
}

}  // namespace aids
