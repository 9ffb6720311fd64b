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

#include "aids/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "aids/errors.hpp"
#include "aids/rng.hpp"

#ifndef AIDS_DEFAULT_TAXONOMY_PATH
#define AIDS_DEFAULT_TAXONOMY_PATH "data/kdd_taxonomy.csv"
#endif

namespace aids {

const std::array<FeatureSpec, kNumFeatures> kFeatureSchema = {{
    {"duration", FeatureKind::Count},
    {"protocol_type", FeatureKind::Symbolic},
    {"service", FeatureKind::Symbolic},
    {"flag", FeatureKind::Symbolic},
    {"src_bytes", FeatureKind::Count},
    {"dst_bytes", FeatureKind::Count},
    {"land", FeatureKind::Boolean},
    {"wrong_fragment", FeatureKind::Count},
    {"urgent", FeatureKind::Count},
    {"hot", FeatureKind::Count},
    {"num_failed_logins", FeatureKind::Count},
    {"logged_in", FeatureKind::Boolean},
    {"num_compromised", FeatureKind::Count},
    {"root_shell", FeatureKind::Boolean},
    {"su_attempted", FeatureKind::Boolean},
    {"num_root", FeatureKind::Count},
    {"num_file_creations", FeatureKind::Count},
    {"num_shells", FeatureKind::Count},
    {"num_access_files", FeatureKind::Count},
    {"num_outbound_cmds", FeatureKind::Count},
    {"is_host_login", FeatureKind::Boolean},
    {"is_guest_login", FeatureKind::Boolean},
    {"count", FeatureKind::Count},
    {"srv_count", FeatureKind::Count},
    {"serror_rate", FeatureKind::Rate},
    {"srv_serror_rate", FeatureKind::Rate},
    {"rerror_rate", FeatureKind::Rate},
    {"srv_rerror_rate", FeatureKind::Rate},
    {"same_srv_rate", FeatureKind::Rate},
    {"diff_srv_rate", FeatureKind::Rate},
    {"srv_diff_host_rate", FeatureKind::Rate},
    {"dst_host_count", FeatureKind::Count},
    {"dst_host_srv_count", FeatureKind::Count},
    {"dst_host_same_srv_rate", FeatureKind::Rate},
    {"dst_host_diff_srv_rate", FeatureKind::Rate},
    {"dst_host_same_src_port_rate", FeatureKind::Rate},
    {"dst_host_srv_diff_host_rate", FeatureKind::Rate},
    {"dst_host_serror_rate", FeatureKind::Rate},
    {"dst_host_srv_serror_rate", FeatureKind::Rate},
    {"dst_host_rerror_rate", FeatureKind::Rate},
    {"dst_host_srv_rerror_rate", FeatureKind::Rate},
}};

namespace {

constexpr std::array<std::string_view, 5> kCategoryNames = {"DoS", "Probe", "U2R", "R2L",
                                                            "Unknown"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

// Continuous slot for each schema column, or -1 for symbolic columns.
const std::array<int, kNumFeatures>& slot_table() {
  static const std::array<int, kNumFeatures> table = [] {
    std::array<int, kNumFeatures> t{};
    int next = 0;
    for (std::size_t c = 0; c < kNumFeatures; ++c) {
      t[c] = kFeatureSchema[c].kind == FeatureKind::Symbolic ? -1 : next++;
    }
    return t;
  }();
  return table;
}

std::size_t symbolic_slot_of(std::size_t column) {
  for (std::size_t k = 0; k < kNumSymbolic; ++k) {
    if (kSymbolicColumns[k] == column) return k;
  }
  throw std::out_of_range("column is not symbolic");
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string_view to_string(AttackCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

AttackCategory parse_category(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "dos") return AttackCategory::DoS;
  if (t == "probe") return AttackCategory::Probe;
  if (t == "u2r") return AttackCategory::U2R;
  if (t == "r2l") return AttackCategory::R2L;
  return AttackCategory::Unknown;
}

Taxonomy Taxonomy::parse(std::string_view text) {
  Taxonomy tax;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw MalformedRecord(line_no, "taxonomy entry needs 'attack_name,category'");
    }
    tax.table_[lower(trim(line.substr(0, comma)))] = parse_category(line.substr(comma + 1));
  }
  return tax;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open taxonomy file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

AttackCategory Taxonomy::category_of(std::string_view attack_name) const {
  const auto it = table_.find(lower(attack_name));
  return it == table_.end() ? AttackCategory::Unknown : it->second;
}

Label Taxonomy::label_for(std::string_view name) const {
  if (name == "normal") return Label::normal();
  return Label::attack(std::string(name), category_of(name));
}

std::filesystem::path default_taxonomy_path() {
  if (const char* env = std::getenv("AIDS_TAXONOMY"); env != nullptr && *env != '\0') {
    return env;
  }
  return AIDS_DEFAULT_TAXONOMY_PATH;
}

const Taxonomy& default_taxonomy() {
  static const Taxonomy tax = Taxonomy::load(default_taxonomy_path());
  return tax;
}

std::size_t continuous_slot(std::size_t column) {
  const int slot = slot_table().at(column);
  if (slot < 0) throw std::out_of_range("column is symbolic");
  return static_cast<std::size_t>(slot);
}

double ConnectionRecord::numeric(std::size_t column) const {
  return continuous[continuous_slot(column)];
}
double& ConnectionRecord::numeric(std::size_t column) {
  return continuous[continuous_slot(column)];
}

const std::string& ConnectionRecord::symbol(std::size_t symbolic_slot) const {
  switch (symbolic_slot) {
    case 0: return protocol_type;
    case 1: return service;
    case 2: return flag;
  }
  throw std::out_of_range("symbolic slot");
}
std::string& ConnectionRecord::symbol(std::size_t symbolic_slot) {
  return const_cast<std::string&>(std::as_const(*this).symbol(symbolic_slot));
}

ConnectionRecord parse_kdd_line(std::string_view line, const Taxonomy& taxonomy,
                                std::size_t line_number) {
  line = trim(line);
  const auto fields = split_commas(line);
  if (fields.size() != kNumFeatures + 1) {
    throw MalformedRecord(line_number, "expected 42 fields, got " +
                                           std::to_string(fields.size()));
  }
  ConnectionRecord rec;
  for (std::size_t c = 0; c < kNumFeatures; ++c) {
    const FeatureSpec& spec = kFeatureSchema[c];
    const std::string_view text = trim(fields[c]);
    if (spec.kind == FeatureKind::Symbolic) {
      if (text.empty()) throw MalformedField(line_number, std::string(spec.name), "empty symbol");
      rec.symbol(symbolic_slot_of(c)) = std::string(text);
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
        !std::isfinite(v)) {
      throw MalformedField(line_number, std::string(spec.name),
                           "not a number: '" + std::string(text) + "'");
    }
    if (spec.kind == FeatureKind::Rate) {
      if (v < 0.0 || v > 1.0) {
        throw MalformedField(line_number, std::string(spec.name), "rate outside [0,1]");
      }
    } else if (v < 0.0 || std::floor(v) != v) {
      throw MalformedField(line_number, std::string(spec.name),
                           "expected a non-negative integer");
    }
    rec.numeric(c) = v;
  }
  std::string_view label = trim(fields[kNumFeatures]);
  if (!label.empty() && label.back() == '.') label.remove_suffix(1);
  if (label.empty()) throw MalformedField(line_number, "label", "empty label");
  rec.label = taxonomy.label_for(label);
  return rec;
}

std::string feature_text(const ConnectionRecord& record, std::size_t column) {
  if (kFeatureSchema.at(column).kind == FeatureKind::Symbolic) {
    return record.symbol(symbolic_slot_of(column));
  }
  return format_number(record.numeric(column));
}

std::string render_kdd_line(const ConnectionRecord& record) {
  std::string out;
  for (std::size_t c = 0; c < kNumFeatures; ++c) {
    out += feature_text(record, c);
    out += ',';
  }
  out += record.label.name();
  out += '.';
  return out;
}

std::vector<ConnectionRecord> load_kdd_file(const std::filesystem::path& path,
                                            const Taxonomy& taxonomy, std::size_t limit) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<ConnectionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    records.push_back(parse_kdd_line(line, taxonomy, line_no));
    if (limit != 0 && records.size() >= limit) break;
  }
  return records;
}

void write_kdd_file(const std::filesystem::path& path,
                    std::span<const ConnectionRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) out << render_kdd_line(r) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ConnectionRecord> stratified_sample(std::span<const ConnectionRecord> records,
                                                std::size_t n, std::uint64_t seed) {
  if (n >= records.size()) return {records.begin(), records.end()};

  // Groups in first-seen order so apportionment ties break reproducibly.
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string key = records[i].label.name();
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(i);
  }

  const double total = static_cast<double>(records.size());
  std::vector<std::size_t> quota(order.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < order.size(); ++g) {
    const double exact = static_cast<double>(n) * groups[order[g]].size() / total;
    quota[g] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[g];
    remainders.emplace_back(exact - std::floor(exact), g);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n && k < remainders.size(); ++k, ++assigned) {
    ++quota[remainders[k].second];
  }

  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  for (std::size_t g = 0; g < order.size(); ++g) {
    auto idx = groups[order[g]];
    rng.shuffle(idx);
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[g]));
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<ConnectionRecord> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(records[i]);
  return out;
}

DatasetSplit split_dataset(std::span<const ConnectionRecord> records,
                           double validation_fraction, double test_fraction,
                           std::uint64_t seed) {
  if (validation_fraction < 0 || test_fraction < 0 || validation_fraction + test_fraction >= 1) {
    throw InvalidConfig("split fractions must be non-negative and sum below 1");
  }
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  const auto n = records.size();
  const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * n));
  const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * n));

  DatasetSplit split;
  split.seed = seed;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = records[idx[k]];
    if (k < n_val) {
      split.validation.push_back(r);
    } else if (k < n_val + n_test) {
      split.test.push_back(r);
    } else {
      split.train.push_back(r);
    }
  }
  return split;
}

std::map<std::string, std::size_t> count_by_category(
    std::span<const ConnectionRecord> records) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) {
    if (r.label.is_attack()) {
      ++counts[std::string(to_string(r.label.category))];
    } else {
      ++counts["Normal"];
    }
  }
  return counts;
}

std::vector<std::string> label_names(std::span<const ConnectionRecord> records) {
  std::vector<std::string> names;
  for (const auto& r : records) {
    auto name = r.label.name();
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
  return names;
}

}  // namespace aids
