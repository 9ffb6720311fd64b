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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "aids/dataset.hpp"
#include "aids/digest.hpp"
#include "aids/encoder.hpp"
#include "aids/mlp.hpp"
#include "aids/svm.hpp"

namespace aids {

enum class ClassifierKind { Mlp, Svm };
enum class TrainerKind { Rprop, Lm };

std::string_view to_string(ClassifierKind k);
std::string_view to_string(TrainerKind k);

/// Everything needed to (re)train a classifier from a labelled corpus.
struct TrainSpec {
  ClassifierKind kind = ClassifierKind::Svm;
  std::vector<std::size_t> hidden_size_grid = {15, 25, 40};
  TrainerKind trainer = TrainerKind::Rprop;
  RpropConfig rprop;
  LmConfig lm;
  /// An RBF gamma of 0 means 1 / encoded_width, resolved at training time.
  SmoConfig smo{.kernel = Kernel::rbf(0.0)};
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
  /// Canonical one-line description stored in artifact manifests.
  std::string snapshot() const;
};

struct CandidateResult {
  std::size_t hidden_size = 0;
  double validation_error = 0.0;  // misclassification rate

  bool operator==(const CandidateResult&) const = default;
};

struct Manifest {
  std::string training_digest;
  std::uint64_t seed = 0;
  std::string config;
  std::int64_t created_at_ms = 0;
  std::size_t corpus_size = 0;
  /// Evidence records folded in by the retrain that produced this artifact.
  std::size_t evidence_folded = 0;
  /// MLP hidden-size search log; empty for SVM.
  std::vector<CandidateResult> candidates;
  std::size_t hidden_size = 0;
  std::size_t support_vectors = 0;

  bool operator==(const Manifest&) const = default;
};

struct ClassifierArtifact {
  ClassifierKind kind = ClassifierKind::Svm;
  EncoderModel encoder;
  std::variant<MlpNetwork, SvmModel> model;
  std::uint64_t version = 1;
  Manifest manifest;
};

struct Prediction {
  LabelKind cls = LabelKind::Normal;
  /// MLP: output Y in (0,1). SVM: raw decision value.
  double score = 0.0;

  bool is_attack() const { return cls == LabelKind::Attack; }
  bool operator==(const Prediction&) const = default;
};

/// Decision recorded for a triaged alarm.
enum class Decision { ConfirmedAttack, FalseAlarm };

struct Evidence {
  ConnectionRecord record;
  Decision decision = Decision::ConfirmedAttack;

  bool operator==(const Evidence&) const = default;
};

/// Order-sensitive SHA-256 over the corpus rendered as KDD lines.
std::string corpus_digest(std::span<const ConnectionRecord> corpus);

/// Fits the encoder on the corpus, then trains the model. For MLP every
/// grid size is trained on a seeded train split and scored on the held-out
/// part; the best size (ties to the smaller) is retrained on the full corpus.
/// Throws DegenerateLabels unless both classes are present.
ClassifierArtifact train(const TrainSpec& spec, std::span<const ConnectionRecord> corpus,
                         std::int64_t created_at_ms);

Prediction predict(const ClassifierArtifact& artifact, const ConnectionRecord& record);

/// The corpus a retrain trains on: base plus relabelled evidence.
std::vector<ConnectionRecord> retrain_corpus(std::span<const ConnectionRecord> base_corpus,
                                             std::span<const Evidence> evidence);

/// Trains from scratch on retrain_corpus(...) and returns version + 1.
/// Throws NoNewEvidence for empty evidence unless `force`.
ClassifierArtifact retrain(const ClassifierArtifact& artifact,
                           std::span<const ConnectionRecord> base_corpus,
                           std::span<const Evidence> evidence, const TrainSpec& spec,
                           std::int64_t created_at_ms, bool force = false);

/// "AIDS" magic, u16 format version, u32-length canonical JSON metadata,
/// u64 count and that many little-endian IEEE-754 doubles.
Bytes serialize(const ClassifierArtifact& artifact);
/// Throws CorruptArtifact on bad magic, version, truncation or schema.
ClassifierArtifact deserialize(std::span<const std::uint8_t> bytes);

std::string artifact_digest(const ClassifierArtifact& artifact);

void save_artifact(const std::filesystem::path& path, const ClassifierArtifact& artifact);
ClassifierArtifact load_artifact(const std::filesystem::path& path);

/// The manifest as the JSON object stored in artifact metadata.
nlohmann::json manifest_json(const Manifest& manifest);

/// Hidden units for MLP, support vectors for SVM.
std::size_t model_size(const ClassifierArtifact& artifact);

}  // namespace aids
