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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "aids/errors.hpp"
#include "aids/harness.hpp"

namespace aids {

namespace {

struct RawValue {
  std::string text;
  std::size_t line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return std::string(s.substr(0, i));
  }
  return std::string(s);
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

class Fields {
 public:
  explicit Fields(std::map<std::string, RawValue> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key) {
    const auto& raw = take(key);
    return unquote(key, raw.text);
  }

  double num(const std::string& key) {
    const auto& raw = take(key);
    return parse_double(key, raw.text);
  }

  std::uint64_t uint(const std::string& key) {
    const auto& raw = take(key);
    std::uint64_t v = 0;
    const auto* end = raw.text.data() + raw.text.size();
    auto [p, ec] = std::from_chars(raw.text.data(), end, v);
    if (ec != std::errc{} || p != end) fail(key, "expected a non-negative integer, got " + raw.text);
    return v;
  }

  bool boolean(const std::string& key) {
    const auto& raw = take(key);
    if (raw.text == "true") return true;
    if (raw.text == "false") return false;
    fail(key, "expected true or false, got " + raw.text);
  }

  std::vector<std::string> items(const std::string& key) {
    const auto& raw = take(key);
    const auto& t = raw.text;
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') fail(key, "expected an array");
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      const char c = t[i];
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted) {
        out.push_back(trim(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (quoted) fail(key, "unterminated string");
    if (!trim(cur).empty()) out.push_back(trim(cur));
    for (const auto& item : out) {
      if (item.empty()) fail(key, "empty array element");
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    auto v = items(key);
    for (auto& s : v) s = unquote(key, s);
    return v;
  }

  std::vector<std::size_t> sizes(const std::string& key) {
    std::vector<std::size_t> out;
    for (const auto& s : items(key)) {
      std::size_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) fail(key, "expected integers, got " + s);
      out.push_back(v);
    }
    return out;
  }

  void reject_unused() const {
    for (const auto& [key, raw] : values_) {
      if (!used_.count(key)) {
        throw ConfigError("field '" + key + "' (line " + std::to_string(raw.line) +
                          "): unknown field");
      }
    }
  }

 private:
  const RawValue& take(const std::string& key) {
    used_.insert(key);
    return values_.at(key);
  }

  static std::string unquote(const std::string& key, const std::string& text) {
    if (text.size() < 2 || text.front() != '"' || text.back() != '"') {
      fail(key, "expected a quoted string, got " + text);
    }
    return text.substr(1, text.size() - 2);
  }

  static double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) fail(key, "expected a number, got " + text);
    return v;
  }

  std::map<std::string, RawValue> values_;
  std::set<std::string> used_;
};

std::map<std::string, RawValue> parse_lines(std::string_view text) {
  std::map<std::string, RawValue> out;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[' && body.back() == ']' && body.find('=') == std::string::npos) {
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full)) fail(full, "defined twice");
    out.emplace(full, RawValue{value, line_no});
  }
  return out;
}

}  // namespace

std::string_view to_string(Phase p) { return p == Phase::One ? "one" : "two"; }

void ScenarioConfig::validate() const {
  if (synthetic_data()) {
    if (synthetic.per_class == 0) fail("synthetic.per_class", "must be positive");
    const auto known = synthetic_classes();
    for (const auto& c : synthetic.classes) {
      if (std::find(known.begin(), known.end(), c) == known.end()) {
        fail("synthetic.classes", "unknown class '" + c + "'");
      }
    }
  } else {
    if (train_path.empty()) fail("data.train", "required when data.stream is set");
    if (stream_path.empty()) fail("data.stream", "required when data.train is set");
    if (!std::filesystem::exists(train_path)) fail("data.train", "no such file " + train_path.string());
    if (!std::filesystem::exists(stream_path)) fail("data.stream", "no such file " + stream_path.string());
  }
  if (monitors == 0) fail("nodes.monitors", "must be at least 1");
  if (!(honeypot_fraction >= 0.0 && honeypot_fraction <= 1.0)) {
    fail("nodes.honeypot_fraction", "must be in [0, 1]");
  }
  if (!(p_detect >= 0.0 && p_detect <= 1.0)) fail("nodes.p_detect", "must be in [0, 1]");
  if (phase == Phase::One && (!holdout_attacks.empty() || !holdout_services.empty())) {
    fail("phase", "holdouts need phase = \"two\"");
  }
  try {
    spec.validate();
  } catch (const aids::Error& e) {
    throw ConfigError("field 'classifier': " + std::string(e.what()));
  }
}

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  Fields f(parse_lines(text));
  ScenarioConfig c;
  const auto opt = [&](const std::string& key, auto&& apply) {
    if (f.has(key)) apply(key);
  };
  const auto path = [&](const std::string& key) {
    std::filesystem::path p = f.str(key);
    if (!p.empty() && p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p;
  };

  opt("name", [&](const auto& k) { c.name = f.str(k); });
  opt("seed", [&](const auto& k) { c.seed = f.uint(k); });
  opt("phase", [&](const auto& k) {
    const auto v = f.str(k);
    if (v == "one") c.phase = Phase::One;
    else if (v == "two") c.phase = Phase::Two;
    else fail(k, "expected \"one\" or \"two\", got \"" + v + "\"");
  });

  opt("data.train", [&](const auto& k) { c.train_path = path(k); });
  opt("data.stream", [&](const auto& k) { c.stream_path = path(k); });
  opt("data.train_sample", [&](const auto& k) { c.train_sample = f.uint(k); });
  opt("data.stream_sample", [&](const auto& k) { c.stream_sample = f.uint(k); });
  opt("synthetic.per_class", [&](const auto& k) { c.synthetic.per_class = f.uint(k); });
  opt("synthetic.classes", [&](const auto& k) { c.synthetic.classes = f.strings(k); });

  auto& s = c.spec;
  opt("classifier.kind", [&](const auto& k) {
    const auto v = f.str(k);
    if (v == "svm") s.kind = ClassifierKind::Svm;
    else if (v == "mlp") s.kind = ClassifierKind::Mlp;
    else fail(k, "expected \"svm\" or \"mlp\", got \"" + v + "\"");
  });
  opt("classifier.seed", [&](const auto& k) { s.seed = f.uint(k); });
  opt("classifier.validation_fraction", [&](const auto& k) { s.validation_fraction = f.num(k); });
  opt("classifier.hidden_sizes", [&](const auto& k) { s.hidden_size_grid = f.sizes(k); });
  opt("classifier.trainer", [&](const auto& k) {
    const auto v = f.str(k);
    if (v == "rprop") s.trainer = TrainerKind::Rprop;
    else if (v == "lm") s.trainer = TrainerKind::Lm;
    else fail(k, "expected \"rprop\" or \"lm\", got \"" + v + "\"");
  });
  opt("classifier.epochs", [&](const auto& k) {
    s.rprop.max_epochs = s.lm.max_epochs = f.uint(k);
  });
  opt("classifier.target_mse", [&](const auto& k) { s.rprop.target_mse = s.lm.target_mse = f.num(k); });
  opt("classifier.C", [&](const auto& k) { s.smo.C = f.num(k); });
  opt("classifier.tolerance", [&](const auto& k) { s.smo.tolerance = f.num(k); });
  opt("classifier.max_passes", [&](const auto& k) { s.smo.max_passes = f.uint(k); });
  opt("classifier.kernel", [&](const auto& k) {
    const auto v = f.str(k);
    if (v == "rbf") s.smo.kernel.type = KernelType::Rbf;
    else if (v == "linear") s.smo.kernel = Kernel::linear();
    else fail(k, "expected \"rbf\" or \"linear\", got \"" + v + "\"");
  });
  opt("classifier.gamma", [&](const auto& k) { s.smo.kernel.gamma = f.num(k); });

  opt("nodes.monitors", [&](const auto& k) { c.monitors = f.uint(k); });
  opt("nodes.honeypot_fraction", [&](const auto& k) { c.honeypot_fraction = f.num(k); });
  opt("nodes.p_detect", [&](const auto& k) { c.p_detect = f.num(k); });
  opt("nodes.officer", [&](const auto& k) {
    try {
      c.officer = parse_officer_policy(f.str(k));
    } catch (const ConfigError& e) {
      fail(k, e.what());
    }
  });
  opt("nodes.retrain_threshold", [&](const auto& k) { c.retrain_threshold = f.uint(k); });
  opt("nodes.probe_size", [&](const auto& k) { c.probe_size = f.uint(k); });

  opt("holdout.attacks", [&](const auto& k) { c.holdout_attacks = f.strings(k); });
  opt("holdout.services", [&](const auto& k) { c.holdout_services = f.strings(k); });

  f.reject_unused();
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

}  // namespace aids
