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
#include <cmath>

#include "aids/errors.hpp"
#include "aids/harness.hpp"
#include "aids/rng.hpp"

namespace aids {

namespace {

// Schema columns used below.
enum Col : std::size_t {
  kDuration = 0, kSrcBytes = 4, kDstBytes = 5, kHot = 9, kFailedLogins = 10, kLoggedIn = 11,
  kCount = 22, kSrvCount = 23, kSerror = 24, kSrvSerror = 25, kRerror = 26, kSrvRerror = 27,
  kSameSrv = 28, kDiffSrv = 29, kHostCount = 31, kHostSrvCount = 32, kHostSameSrv = 33,
  kHostDiffSrv = 34, kHostSameSrcPort = 35, kHostSerror = 37, kHostSrvSerror = 38,
  kHostRerror = 39, kHostSrvRerror = 40,
};

struct Gen {
  Rng& rng;
  ConnectionRecord r;

  Gen& sym(const char* protocol, const char* service, const char* flag) {
    r.protocol_type = protocol;
    r.service = service;
    r.flag = flag;
    return *this;
  }
  Gen& count(std::size_t col, double lo, double hi) {
    r.numeric(col) = std::round(rng.uniform(lo, hi));
    return *this;
  }
  Gen& rate(std::size_t col, double lo, double hi) {
    r.numeric(col) = std::round(rng.uniform(lo, hi) * 100.0) / 100.0;
    return *this;
  }
  Gen& set(std::size_t col, double v) {
    r.numeric(col) = v;
    return *this;
  }
};

ConnectionRecord make(const std::string& cls, Rng& rng) {
  Gen g{rng, {}};
  if (cls == "normal:http") {
    g.sym("tcp", "http", "SF").count(kSrcBytes, 150, 400).count(kDstBytes, 1000, 8000)
        .set(kLoggedIn, 1).count(kCount, 1, 15).count(kSrvCount, 1, 15).rate(kSameSrv, 0.9, 1)
        .count(kHostCount, 20, 255).count(kHostSrvCount, 20, 255).rate(kHostSameSrv, 0.8, 1);
  } else if (cls == "normal:smtp") {
    g.sym("tcp", "smtp", "SF").count(kDuration, 0, 3).count(kSrcBytes, 500, 2000)
        .count(kDstBytes, 200, 500).set(kLoggedIn, 1).count(kCount, 1, 5).count(kSrvCount, 1, 5)
        .set(kSameSrv, 1).count(kHostCount, 50, 255).count(kHostSrvCount, 10, 120)
        .rate(kHostSameSrv, 0.3, 0.7);
  } else if (cls == "normal:domain_u") {
    g.sym("udp", "domain_u", "SF").count(kSrcBytes, 30, 50).count(kDstBytes, 30, 150)
        .count(kCount, 50, 200).count(kSrvCount, 50, 200).set(kSameSrv, 1)
        .count(kHostCount, 100, 255).set(kHostSrvCount, 255).rate(kHostSameSrv, 0.9, 1);
  } else if (cls == "normal:ftp_data") {
    // Bulk backup bursts: smurf-like volumes from a benign service.
    g.sym("tcp", "ftp_data", "SF").count(kSrcBytes, 900, 1100).count(kCount, 450, 511)
        .count(kSrvCount, 450, 511).set(kSameSrv, 1).set(kHostCount, 255)
        .set(kHostSrvCount, 255).set(kHostSameSrv, 1).rate(kHostSameSrcPort, 0.9, 1);
  } else if (cls == "smurf") {
    g.sym("icmp", "ecr_i", "SF").count(kSrcBytes, 1000, 1040).count(kCount, 450, 511)
        .count(kSrvCount, 450, 511).set(kSameSrv, 1).set(kHostCount, 255)
        .set(kHostSrvCount, 255).set(kHostSameSrv, 1).rate(kHostSameSrcPort, 0.9, 1);
  } else if (cls == "neptune") {
    g.sym("tcp", "private", "S0").count(kCount, 100, 300).count(kSrvCount, 5, 25)
        .set(kSerror, 1).set(kSrvSerror, 1).rate(kSameSrv, 0, 0.1).rate(kDiffSrv, 0.05, 0.1)
        .set(kHostCount, 255).count(kHostSrvCount, 5, 25).rate(kHostSameSrv, 0, 0.1)
        .rate(kHostDiffSrv, 0.05, 0.1).set(kHostSerror, 1).set(kHostSrvSerror, 1);
  } else if (cls == "satan") {
    g.sym("tcp", "other", "REJ").count(kCount, 1, 20).count(kSrvCount, 1, 5).set(kRerror, 1)
        .set(kSrvRerror, 1).rate(kSameSrv, 0, 0.2).rate(kDiffSrv, 0.5, 1).count(kHostCount, 1, 50)
        .count(kHostSrvCount, 1, 10).rate(kHostDiffSrv, 0.5, 1).set(kHostRerror, 1)
        .set(kHostSrvRerror, 1);
  } else if (cls == "ipsweep") {
    g.sym("icmp", "eco_i", "SF").count(kSrcBytes, 8, 20).count(kCount, 1, 3)
        .count(kSrvCount, 1, 40).set(kSameSrv, 1).count(kHostCount, 1, 80)
        .count(kHostSrvCount, 1, 80).set(kHostSameSrv, 1).set(kHostSameSrcPort, 1);
  } else if (cls == "guess_passwd") {
    // Short interactive logins that look like ordinary small sessions.
    g.sym("tcp", "telnet", "SF").count(kDuration, 2, 4).count(kSrcBytes, 100, 140)
        .count(kDstBytes, 150, 200).set(kHot, 1).set(kFailedLogins, 1).count(kCount, 1, 3)
        .count(kSrvCount, 1, 3).set(kSameSrv, 1).count(kHostCount, 1, 30)
        .count(kHostSrvCount, 1, 30).set(kHostSameSrv, 1);
  } else {
    throw InvalidConfig("unknown synthetic class '" + cls + "'");
  }
  g.r.label = default_taxonomy().label_for(cls.starts_with("normal:") ? "normal" : cls);
  return g.r;
}

}  // namespace

std::vector<std::string> synthetic_classes() {
  return {"normal:http", "normal:smtp", "normal:domain_u", "normal:ftp_data", "smurf",
          "neptune",     "satan",       "ipsweep",         "guess_passwd"};
}

std::vector<ConnectionRecord> synthetic_traffic(const SyntheticSpec& spec, std::uint64_t seed) {
  const auto classes = spec.classes.empty() ? synthetic_classes() : spec.classes;
  Rng rng(seed);
  std::vector<ConnectionRecord> out;
  out.reserve(spec.per_class * classes.size());
  for (std::size_t i = 0; i < spec.per_class; ++i) {
    for (const auto& cls : classes) out.push_back(make(cls, rng));
  }
  return out;
}

}  // namespace aids
