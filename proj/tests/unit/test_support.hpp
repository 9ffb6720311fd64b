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

#include <cmath>
#include <string>
#include <vector>

#include "aids/dataset.hpp"
#include "aids/rng.hpp"

namespace aids::testing {

// First record of the public kddcup.data_10_percent file.
inline constexpr const char* kFirstKddLine =
    "0,tcp,http,SF,181,5450,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,8,8,0.00,0.00,0.00,0.00,1.00,"
    "0.00,0.00,9,9,1.00,0.00,0.11,0.00,0.00,0.00,0.00,0.00,normal.";

inline ConnectionRecord make_record(const std::string& protocol, const std::string& service,
                                    const std::string& flag, double src_bytes,
                                    const std::string& label = "normal") {
  ConnectionRecord r;
  r.protocol_type = protocol;
  r.service = service;
  r.flag = flag;
  r.numeric(4) = src_bytes;
  r.label = default_taxonomy().label_for(label);
  return r;
}

/// Record with every feature drawn at random within its schema range.
inline ConnectionRecord random_record(Rng& rng) {
  static const std::vector<std::string> protocols = {"tcp", "udp", "icmp"};
  static const std::vector<std::string> services = {"http", "smtp", "ftp_data", "private",
                                                    "ecr_i", "telnet", "domain_u", "other"};
  static const std::vector<std::string> flags = {"SF", "S0", "REJ", "RSTO", "SH"};
  static const std::vector<std::string> labels = {"normal", "smurf", "neptune", "satan",
                                                  "guess_passwd", "mailbomb", "novel_x"};
  ConnectionRecord r;
  r.protocol_type = protocols[rng.index(protocols.size())];
  r.service = services[rng.index(services.size())];
  r.flag = flags[rng.index(flags.size())];
  for (std::size_t c = 0; c < kNumFeatures; ++c) {
    switch (kFeatureSchema[c].kind) {
      case FeatureKind::Symbolic: break;
      case FeatureKind::Boolean: r.numeric(c) = static_cast<double>(rng.index(2)); break;
      case FeatureKind::Count: r.numeric(c) = static_cast<double>(rng.index(100000)); break;
      case FeatureKind::Rate: r.numeric(c) = std::round(rng.uniform() * 100.0) / 100.0; break;
    }
  }
  r.label = default_taxonomy().label_for(labels[rng.index(labels.size())]);
  return r;
}

/// Normal web traffic with small payloads against large icmp smurf bursts.
inline std::vector<ConnectionRecord> toy_corpus(std::size_t each, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ConnectionRecord> v;
  for (std::size_t i = 0; i < each; ++i) {
    v.push_back(make_record("tcp", i % 3 == 0 ? "smtp" : "http", "SF", rng.uniform(100, 600)));
    auto a = make_record("icmp", "ecr_i", "SF", rng.uniform(900, 1100), "smurf");
    a.numeric(22) = 500;  // count
    v.push_back(a);
  }
  return v;
}

}  // namespace aids::testing
