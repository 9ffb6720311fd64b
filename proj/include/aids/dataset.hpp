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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aids {

inline constexpr std::size_t kNumFeatures = 41;
inline constexpr std::size_t kNumSymbolic = 3;
inline constexpr std::size_t kNumContinuous = kNumFeatures - kNumSymbolic;

enum class FeatureKind { Symbolic, Boolean, Count, Rate };

struct FeatureSpec {
  std::string_view name;
  FeatureKind kind;
};

/// Column layout of a KDD99 connection record, in file order.
extern const std::array<FeatureSpec, kNumFeatures> kFeatureSchema;

/// Schema positions of protocol_type, service, flag.
inline constexpr std::array<std::size_t, kNumSymbolic> kSymbolicColumns = {1, 2, 3};

enum class AttackCategory { DoS, Probe, U2R, R2L, Unknown };

std::string_view to_string(AttackCategory c);
AttackCategory parse_category(std::string_view text);

enum class LabelKind { Normal, Attack };

struct Label {
  LabelKind kind = LabelKind::Normal;
  std::string attack_name;  // empty for Normal
  AttackCategory category = AttackCategory::Unknown;

  static Label normal() { return {}; }
  static Label attack(std::string name, AttackCategory category) {
    return {LabelKind::Attack, std::move(name), category};
  }

  bool is_attack() const { return kind == LabelKind::Attack; }
  /// "normal" or the attack name; the per-name grouping key.
  std::string name() const { return is_attack() ? attack_name : "normal"; }

  bool operator==(const Label&) const = default;
};

/// attack_name -> category lookup loaded from a `name,category` text file.
class Taxonomy {
 public:
  Taxonomy() = default;

  static Taxonomy parse(std::string_view text);
  static Taxonomy load(const std::filesystem::path& path);

  /// Unknown names map to AttackCategory::Unknown.
  AttackCategory category_of(std::string_view attack_name) const;
  std::size_t size() const { return table_.size(); }

  /// Label for a raw label token ("normal" or an attack name, no dot).
  Label label_for(std::string_view name) const;

 private:
  std::unordered_map<std::string, AttackCategory> table_;
};

/// The taxonomy shipped in data/kdd_taxonomy.csv. The path is taken from
/// $AIDS_TAXONOMY when set, else from the install location baked in at
/// build time. Loaded once.
const Taxonomy& default_taxonomy();
std::filesystem::path default_taxonomy_path();

/// One labelled KDD99 connection. The 38 non-symbolic features are kept in
/// schema order in `continuous`; the three symbolic ones by name.
struct ConnectionRecord {
  std::array<double, kNumContinuous> continuous{};
  std::string protocol_type;
  std::string service;
  std::string flag;
  Label label;

  /// Value of a non-symbolic schema column (schema index, not continuous index).
  double numeric(std::size_t column) const;
  double& numeric(std::size_t column);
  const std::string& symbol(std::size_t symbolic_slot) const;
  std::string& symbol(std::size_t symbolic_slot);

  bool operator==(const ConnectionRecord&) const = default;
};

/// Maps a schema column to its slot in ConnectionRecord::continuous.
/// Precondition: the column is not symbolic.
std::size_t continuous_slot(std::size_t column);

/// Parses one 42-field line. `line_number` is reported in errors.
ConnectionRecord parse_kdd_line(std::string_view line, const Taxonomy& taxonomy,
                                std::size_t line_number = 1);

/// Inverse of parse_kdd_line; label is dot-terminated like the public files.
std::string render_kdd_line(const ConnectionRecord& record);

/// Field text of a schema column, as it would appear in a KDD file.
std::string feature_text(const ConnectionRecord& record, std::size_t column);

/// Reads a KDD99 file. Blank lines are skipped; `limit` = 0 means all.
std::vector<ConnectionRecord> load_kdd_file(const std::filesystem::path& path,
                                            const Taxonomy& taxonomy,
                                            std::size_t limit = 0);
void write_kdd_file(const std::filesystem::path& path,
                    std::span<const ConnectionRecord> records);

/// Per-label-name sample of size min(n, |records|). Group proportions are
/// kept within one record by largest-remainder apportionment; output keeps
/// the input order of the selected records.
std::vector<ConnectionRecord> stratified_sample(std::span<const ConnectionRecord> records,
                                                std::size_t n, std::uint64_t seed);

struct DatasetSplit {
  std::vector<ConnectionRecord> train;
  std::vector<ConnectionRecord> validation;
  std::vector<ConnectionRecord> test;
  std::uint64_t seed = 0;
};

/// Shuffled split by index; fractions are of |records| and rounded down.
DatasetSplit split_dataset(std::span<const ConnectionRecord> records,
                           double validation_fraction, double test_fraction,
                           std::uint64_t seed);

/// Counts of Normal plus each attack category, keyed by display name.
std::map<std::string, std::size_t> count_by_category(
    std::span<const ConnectionRecord> records);

/// Distinct label names (attack names and "normal") present in `records`.
std::vector<std::string> label_names(std::span<const ConnectionRecord> records);

}  // namespace aids
