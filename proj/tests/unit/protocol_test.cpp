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

#include "aids/protocol.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "aids/errors.hpp"
#include "protocol_support.hpp"

namespace aids {
namespace {

using testing::make_record;
using testing::random_envelope;

TEST(Protocol, AckRoundTrip) {
  const Envelope e{"central", kProtocolVersion, AckBody{"n1:4", 3}};
  EXPECT_EQ(decode_message(encode_message(e)), e);
  EXPECT_EQ(e.type(), MsgType::Ack);
}

TEST(Protocol, BogusTypeIsUnknownMessage) {
  EXPECT_THROW(decode_message(R"({"msg_type":"Bogus","sender_id":"x","protocol_version":1,"payload":{}})"),
               UnknownMessage);
}

TEST(Protocol, SchemaViolationsAreProtocolErrors) {
  EXPECT_THROW(decode_message("not json"), ProtocolError);
  EXPECT_THROW(decode_message(R"({"msg_type":"Ack","sender_id":"x","protocol_version":1,"payload":{"ref":"a"}})"),
               ProtocolError);
  EXPECT_THROW(decode_message(R"({"msg_type":"Ack","sender_id":"x","protocol_version":2,"payload":{"ref":"a","applied_version":1}})"),
               ProtocolError);
  EXPECT_THROW(decode_message(R"({"msg_type":"Ack","sender_id":"x","protocol_version":1,"payload":{"ref":"a","applied_version":-1}})"),
               ProtocolError);
  EXPECT_THROW(decode_message(R"({"msg_type":"Verdict","sender_id":"x","protocol_version":1,"payload":{"alarm_id":"a","decision":"pending","decided_by":"oracle","timestamp":0}})"),
               ProtocolError);
  EXPECT_THROW(decode_message(R"({"msg_type":"ModelUpdate","sender_id":"x","protocol_version":1,"payload":{"version":1,"artifact_bytes":"@@@","digest":""}})"),
               ProtocolError);
}

TEST(Protocol, AlarmWithCommaInServiceSurvives) {
  AlarmReport a;
  a.alarm_id = "mon-1:7";
  a.node_id = "mon-1";
  a.record = make_record("tcp", "we,ird\nsvc", "SF", 181, "smurf");
  a.score = 0.73;
  a.model_version_used = 2;
  a.timestamp = 99;
  const Envelope e{"mon-1", kProtocolVersion, a};
  const auto line = encode_message(e);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(decode_message(line), e);
}

TEST(Protocol, RandomEnvelopesRoundTrip) {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const auto e = random_envelope(rng);
    const auto line = encode_message(e);
    ASSERT_EQ(line.find('\n'), std::string::npos);
    ASSERT_EQ(decode_message(line), e) << line;
  }
}

TEST(Protocol, ConcatenatedFramesSplitBackToSequence) {
  Rng rng(32);
  std::vector<Envelope> sent;
  std::string stream;
  for (int i = 0; i < 500; ++i) {
    sent.push_back(random_envelope(rng));
    stream += encode_message(sent.back()) + "\n";
  }
  std::istringstream in(stream);
  std::vector<Envelope> got;
  for (std::string line; std::getline(in, line);) got.push_back(decode_message(line));
  EXPECT_EQ(got, sent);
}

TEST(Protocol, ErrorEnvelopeCarriesKind) {
  const auto e = error_envelope("central", Conflict("already decided"));
  const auto& body = std::get<ErrorBody>(e.body);
  EXPECT_EQ(body.code, "Conflict");
  EXPECT_EQ(body.message, "already decided");
}

ModelUpdate update_with_version(std::uint64_t v) {
  ModelUpdate u;
  u.version = v;
  u.artifact_bytes = {1, 2, 3, 4};
  u.digest = sha256_hex(u.artifact_bytes);
  return u;
}

TEST(AcceptsUpdate, VersionRules) {
  EXPECT_FALSE(accepts_update(3, update_with_version(3)));
  EXPECT_FALSE(accepts_update(3, update_with_version(2)));
  EXPECT_TRUE(accepts_update(3, update_with_version(4)));
}

TEST(AcceptsUpdate, CorruptedBytesRejected) {
  auto u = update_with_version(5);
  u.artifact_bytes[0] ^= 0xff;
  EXPECT_THROW(accepts_update(1, u), IntegrityError);
}

}  // namespace
}  // namespace aids
