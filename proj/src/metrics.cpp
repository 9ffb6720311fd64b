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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aids/errors.hpp"
#include "aids/harness.hpp"

namespace aids {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string pct(std::optional<double> r) {
  if (!r) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *r * 100.0);
  return buf;
}

std::string text_row(const std::string& name, const std::string& vectors,
                     const std::string& detected, const std::string& rate, const std::string& tail) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-28s %9s %9s %19s  %s", name.c_str(), vectors.c_str(),
                detected.c_str(), rate.c_str(), tail.c_str());
  std::string s = buf;
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s + "\n";
}

std::size_t to_size(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw MalformedRecord(line, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::optional<double> AttackRow::detection_rate() const { return ratio(detected, vectors); }

std::size_t MetricsReport::known_vectors() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.is_new ? 0 : r.vectors;
  return n;
}

std::size_t MetricsReport::known_detected() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.is_new ? 0 : r.detected;
  return n;
}

std::size_t MetricsReport::new_vectors() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.is_new ? r.vectors : 0;
  return n;
}

std::size_t MetricsReport::new_detected() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.is_new ? r.detected : 0;
  return n;
}

std::size_t MetricsReport::not_detected() const {
  return known_vectors() + new_vectors() - known_detected() - new_detected();
}

std::optional<double> MetricsReport::known_rate() const { return ratio(known_detected(), known_vectors()); }
std::optional<double> MetricsReport::new_rate() const { return ratio(new_detected(), new_vectors()); }
std::optional<double> MetricsReport::false_alarm_rate() const { return ratio(false_alarms, normal_vectors); }

const AttackRow* MetricsReport::row(std::string_view name) const {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

MetricsReport compute_metrics(std::span<const Outcome> outcomes,
                              const std::set<std::string>& training_names,
                              std::uint64_t model_version) {
  MetricsReport report;
  report.model_version = model_version;
  std::map<std::string, AttackRow> rows;
  for (const auto& o : outcomes) {
    if (!o.label.is_attack()) {
      ++report.normal_vectors;
      report.false_alarms += o.predicted_attack ? 1 : 0;
      continue;
    }
    auto& row = rows[o.label.attack_name];
    row.name = o.label.attack_name;
    row.is_new = training_names.count(row.name) == 0;
    ++row.vectors;
    row.detected += o.predicted_attack ? 1 : 0;
  }
  for (auto& [name, row] : rows) report.rows.push_back(std::move(row));
  return report;
}

std::vector<Outcome> replay_stream(const ClassifierArtifact& artifact,
                                   std::span<const ConnectionRecord> stream) {
  std::vector<Outcome> out;
  out.reserve(stream.size());
  for (const auto& r : stream) out.push_back({r.label, predict(artifact, r).is_attack()});
  return out;
}

std::string render_report(const MetricsReport& report, ReportFormat format) {
  std::ostringstream out;
  const auto n = [](std::size_t v) { return std::to_string(v); };
  if (format == ReportFormat::Csv) {
    const std::string version = std::to_string(report.model_version);
    out << "row,name,vectors,detected,rate_pct,model_version\n";
    for (const auto& r : report.rows) {
      out << (r.is_new ? "new" : "known") << ',' << r.name << ',' << r.vectors << ','
          << r.detected << ',' << pct(r.detection_rate()) << ',' << version << '\n';
    }
    out << "sum_new,Sum of new attacks," << report.new_vectors() << ',' << report.new_detected()
        << ',' << pct(report.new_rate()) << ',' << version << '\n';
    out << "sum_known,Sum of known attacks," << report.known_vectors() << ','
        << report.known_detected() << ',' << pct(report.known_rate()) << ',' << version << '\n';
    out << "normal,False alarms," << report.normal_vectors << ',' << report.false_alarms << ','
        << pct(report.false_alarm_rate()) << ',' << version << '\n';
    return out.str();
  }
  const auto rate = [](std::optional<double> r) { return r ? pct(r) : std::string("-"); };
  out << "Model version " << report.model_version << "\n";
  out << text_row("Attack name", "Vectors", "Detected", "Detection rate [%]", "Type");
  for (const auto& r : report.rows) {
    out << text_row(r.name, n(r.vectors), n(r.detected), rate(r.detection_rate()),
                    r.is_new ? "new" : "known");
  }
  out << text_row("Sum of new attacks", n(report.new_vectors()), n(report.new_detected()),
                  rate(report.new_rate()), "");
  out << text_row("Sum of known attacks", n(report.known_vectors()), n(report.known_detected()),
                  rate(report.known_rate()), "");
  out << text_row("Not detected attacks", n(report.not_detected()), "", "", "");
  out << text_row("Normal vectors", n(report.normal_vectors), "", "", "");
  out << text_row("False alarms", n(report.false_alarms), "", rate(report.false_alarm_rate()), "");
  return out.str();
}

MetricsReport parse_report_csv(std::string_view csv) {
  MetricsReport report;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  bool saw_normal = false;
  std::optional<std::pair<std::size_t, std::size_t>> sum_new, sum_known;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "row,name,vectors,detected,rate_pct,model_version") {
        throw MalformedRecord(line_no, "unexpected header");
      }
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw MalformedRecord(line_no, "expected 6 fields");
    const std::size_t vectors = to_size(f[2], line_no);
    const std::size_t detected = to_size(f[3], line_no);
    report.model_version = to_size(f[5], line_no);
    if (f[0] == "known" || f[0] == "new") {
      report.rows.push_back({f[1], vectors, detected, f[0] == "new"});
    } else if (f[0] == "sum_new") {
      sum_new = {vectors, detected};
    } else if (f[0] == "sum_known") {
      sum_known = {vectors, detected};
    } else if (f[0] == "normal") {
      report.normal_vectors = vectors;
      report.false_alarms = detected;
      saw_normal = true;
    } else {
      throw MalformedRecord(line_no, "unknown row kind '" + f[0] + "'");
    }
  }
  if (!saw_normal || !sum_new || !sum_known) throw MalformedRecord(line_no, "missing summary rows");
  if (*sum_new != std::pair{report.new_vectors(), report.new_detected()} ||
      *sum_known != std::pair{report.known_vectors(), report.known_detected()}) {
    throw MalformedRecord(line_no, "summary rows disagree with attack rows");
  }
  return report;
}

void emit_report(const MetricsReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_report(report, format);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace aids
