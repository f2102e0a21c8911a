// Copyright 2026 The Vendguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <thread>

#include "oracles.hpp"
#include "vendguard/frame_codec.hpp"
#include "vendguard/wire/codec.hpp"
#include "vendguard/wire/deflate.hpp"
#include "vendguard/wire/ingest_server.hpp"
#include "vendguard/wire/series_store.hpp"
#include "vendguard/wire/telemetry_client.hpp"

using namespace vendguard;
using namespace vendguard::wire;

namespace {

TelemetryBatch make_batch(const std::string& id, std::uint64_t seq, std::size_t n, bool compressed,
                          std::uint64_t seed = 1) {
  TelemetryBatch b;
  b.machine_id = id;
  b.sequence_number = seq;
  b.frames = vg_test::synthetic_frames(id, n, seed);
  b.compressed = compressed;
  return b;
}

WireErrc decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_batch(bytes);
  } catch (const WireError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode succeeded";
  return WireErrc::kInvalidBatch;
}

}  // namespace

TEST(Codec, RoundTripBothModes) {
  for (bool compressed : {false, true}) {
    const TelemetryBatch b = make_batch("M007", 42, 60, compressed);
    EXPECT_EQ(decode_batch(encode_batch(b)), b);
  }
}

TEST(Codec, HeaderLayoutIsBitExact) {
  const TelemetryBatch b = make_batch("M1", 0x0102030405060708ull, 2, false);
  const auto bytes = encode_batch(b);
  ASSERT_GE(bytes.size(), kBatchHeaderBytes);
  EXPECT_EQ(bytes[0], 0x56);
  EXPECT_EQ(bytes[1], 0x47);
  EXPECT_EQ(bytes[2], 0x01);
  EXPECT_EQ(bytes[3], 'M');
  EXPECT_EQ(bytes[4], '1');
  for (int i = 5; i < 19; ++i) EXPECT_EQ(bytes[i], 0) << i;
  for (int i = 0; i < 8; ++i) EXPECT_EQ(bytes[19 + i], i + 1);
  EXPECT_EQ(bytes[27], 0);
  const std::string payload = frames_payload_json(b.frames);
  const std::uint32_t len = (std::uint32_t{bytes[28]} << 24) | (std::uint32_t{bytes[29]} << 16) |
                            (std::uint32_t{bytes[30]} << 8) | bytes[31];
  EXPECT_EQ(len, payload.size());
}

TEST(Codec, UncompressedPayloadIsTheJsonArray) {
  const TelemetryBatch b = make_batch("M002", 9, 5, false);
  const auto bytes = encode_batch(b);
  const std::string payload(bytes.begin() + kBatchHeaderBytes, bytes.end());
  EXPECT_EQ(payload, frames_payload_json(b.frames));
  EXPECT_EQ(payload.front(), '[');
  EXPECT_EQ(payload.back(), ']');
}

TEST(Codec, CompressedPayloadInflatesWithIndependentDecoder) {
  const TelemetryBatch b = make_batch("M003", 1, 60, true);
  const auto bytes = encode_batch(b);
  EXPECT_EQ(bytes[27], kFlagCompressed);
  const std::span<const std::uint8_t> payload(bytes.data() + kBatchHeaderBytes, bytes.size() - kBatchHeaderBytes);
  const std::string json = frames_payload_json(b.frames);
  EXPECT_LT(payload.size(), json.size());
  const auto inflated = vg_test::reference_inflate(payload);
  EXPECT_EQ(std::string(inflated.begin(), inflated.end()), json);
}

TEST(Codec, SecondEncoderBytesDecode) {
  const auto frames = vg_test::synthetic_frames("M004", 17, 3);
  const auto bytes = vg_test::reference_encode("M004", 77, frames_payload_json(frames));
  const TelemetryBatch b = decode_batch(bytes);
  EXPECT_EQ(b.machine_id, "M004");
  EXPECT_EQ(b.sequence_number, 77u);
  EXPECT_FALSE(b.compressed);
  EXPECT_EQ(b.frames, frames);
  // The library encoder agrees byte for byte.
  EXPECT_EQ(encode_batch(b), bytes);
}

TEST(Codec, ErrorsAreDistinguishable) {
  auto bytes = encode_batch(make_batch("M005", 3, 10, true));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(decode_error(bad_magic), WireErrc::kBadMagic);
  auto bad_version = bytes;
  bad_version[2] = 2;
  EXPECT_EQ(decode_error(bad_version), WireErrc::kUnsupportedVersion);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_EQ(decode_error(truncated), WireErrc::kLengthMismatch);
  EXPECT_EQ(decode_error({0x56, 0x47, 0x01}), WireErrc::kLengthMismatch);
  auto corrupt = bytes;
  for (std::size_t i = kBatchHeaderBytes; i < corrupt.size(); ++i) corrupt[i] = 0xFF;
  EXPECT_EQ(decode_error(corrupt), WireErrc::kCorruptPayload);
  const auto not_json = vg_test::reference_encode("M005", 1, "[{\"machine_id\":");
  EXPECT_EQ(decode_error(not_json), WireErrc::kCorruptPayload);
}

TEST(Codec, MachineIdMustFitField) {
  TelemetryBatch b = make_batch("M0000000000000001", 1, 1, false);
  EXPECT_THROW(encode_batch(b), WireError);
}

TEST(Codec, RandomizedRoundTrips) {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + gen() % kMaxFramesPerBatch;
    const std::string id = "R" + std::to_string(gen() % 100000);
    TelemetryBatch b = make_batch(id, gen(), n, gen() % 2 == 0, gen());
    ASSERT_EQ(decode_batch(encode_batch(b)), b) << "iteration " << i;
  }
}

TEST(Codec, AckRoundTrip) {
  for (auto status : {AckStatus::kAccepted, AckStatus::kDuplicateIgnored, AckStatus::kRejected}) {
    Ack a{"M009", 12345, status, status == AckStatus::kRejected ? "OutOfOrder" : ""};
    const auto bytes = encode_ack(a);
    EXPECT_EQ(bytes.size(), kAckHeaderBytes + a.reason.size());
    EXPECT_EQ(bytes[27], static_cast<std::uint8_t>(status));
    EXPECT_EQ(decode_ack(bytes), a);
  }
}

TEST(Codec, BatchInvariants) {
  TelemetryBatch b = make_batch("M010", 1, 3, false);
  EXPECT_EQ(batch_violation(b), "");
  auto reversed = b;
  std::swap(reversed.frames[0], reversed.frames[2]);
  EXPECT_EQ(batch_violation(reversed), "OutOfOrder");
  auto empty = b;
  empty.frames.clear();
  EXPECT_EQ(batch_violation(empty), "BatchSize");
  EXPECT_EQ(batch_violation(make_batch("M010", 1, 61, false)), "BatchSize");
  auto foreign = b;
  foreign.frames[1].machine_id = "M011";
  EXPECT_EQ(batch_violation(foreign), "MachineMismatch");
}

TEST(Deflate, MatchesReferenceAndRejectsGarbage) {
  std::string text;
  for (int i = 0; i < 500; ++i) text += "frame " + std::to_string(i % 37) + ";";
  const std::vector<std::uint8_t> in(text.begin(), text.end());
  const auto packed = deflate_raw(in);
  EXPECT_EQ(vg_test::reference_inflate(packed), in);
  EXPECT_EQ(inflate_raw(packed, in.size()), in);
  EXPECT_THROW(inflate_raw(packed, in.size() - 1), WireError);
  const std::vector<std::uint8_t> garbage = {0xFF, 0xFF, 0xFF};
  EXPECT_THROW(inflate_raw(garbage, 100), WireError);
}

TEST(SeriesStore, QueryRangeMatchesLinearScan) {
  SeriesStore store;
  const auto frames = vg_test::synthetic_frames("M000", 20000, 5);
  store.append_frames("M000", frames);
  EXPECT_TRUE(store.query_range("nope", 0, 1LL << 40).empty());
  std::mt19937_64 gen(11);
  const Timestamp t0 = frames.front().timestamp;
  for (int i = 0; i < 50; ++i) {
    Timestamp a = t0 - 100 + static_cast<Timestamp>(gen() % 200100);
    Timestamp b = t0 - 100 + static_cast<Timestamp>(gen() % 200100);
    if (a > b) std::swap(a, b);
    std::vector<SensorFrame> expected;
    for (const auto& f : frames) {
      if (f.timestamp >= a && f.timestamp <= b) expected.push_back(f);
    }
    ASSERT_EQ(store.query_range("M000", a, b), expected);
  }
  const auto one = store.query_range("M000", frames[10].timestamp, frames[10].timestamp);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], frames[10]);
  EXPECT_THROW(store.query_range("M000", 5, 4), Error);
}

TEST(SeriesStore, DuplicatesAndStaleFramesIgnored) {
  SeriesStore store;
  const TelemetryBatch b = make_batch("M001", 7, 30, false);
  EXPECT_EQ(store.append_batch(b).status, AckStatus::kAccepted);
  EXPECT_EQ(store.append_batch(b).status, AckStatus::kDuplicateIgnored);
  EXPECT_EQ(store.frame_count("M001"), 30u);
  TelemetryBatch overlap = b;
  overlap.sequence_number = 8;
  EXPECT_EQ(store.append_batch(overlap).appended, 0u);
  EXPECT_EQ(store.frame_count("M001"), 30u);
  TelemetryBatch bad = b;
  bad.sequence_number = 9;
  std::reverse(bad.frames.begin(), bad.frames.end());
  const auto r = store.append_batch(bad);
  EXPECT_EQ(r.status, AckStatus::kRejected);
  EXPECT_EQ(r.reason, "OutOfOrder");
}

TEST(SeriesStore, RetentionEvictsOldFrames) {
  SeriesStore store(3600);
  store.append_frames("M002", vg_test::synthetic_frames("M002", 1000, 2));
  const auto all = store.dump("M002");
  ASSERT_FALSE(all.empty());
  EXPECT_EQ(all.back().timestamp - all.front().timestamp, 3600);
}

TEST(IngestServer, ConcurrentMachinesWithDuplicatesAndReconnect) {
  SeriesStore store;
  IngestServer server(store);
  server.start();
  std::vector<std::vector<SensorFrame>> sent(5);
  std::vector<std::thread> clients;
  std::vector<int> duplicate_acks(5, 0);
  for (int m = 0; m < 5; ++m) {
    const std::string id = "M00" + std::to_string(m);
    sent[m] = vg_test::synthetic_frames(id, 1000, 100 + m);
    clients.emplace_back([&, m, id] {
      const auto batches = make_batches(sent[m], 1, 60, m % 2 == 0);
      TelemetryClient client("127.0.0.1", server.port());
      for (std::size_t i = 0; i < batches.size(); ++i) {
        EXPECT_EQ(client.send(batches[i]).status, AckStatus::kAccepted);
        if (i == 7) {
          if (client.send(batches[i]).status == AckStatus::kDuplicateIgnored) ++duplicate_acks[m];
          client.close();
          client.connect("127.0.0.1", server.port());
          if (client.send(batches[i - 1]).status == AckStatus::kDuplicateIgnored) ++duplicate_acks[m];
        }
      }
    });
  }
  for (auto& t : clients) t.join();
  server.stop();
  for (int m = 0; m < 5; ++m) {
    EXPECT_EQ(store.dump("M00" + std::to_string(m)), sent[m]);
    EXPECT_EQ(duplicate_acks[m], 2);
  }
  EXPECT_EQ(store.total_frames(), 5000u);
}

TEST(IngestServer, ProtocolErrorRejectsAndCloses) {
  SeriesStore store;
  IngestServer server(store);
  server.start();
  TelemetryClient client("127.0.0.1", server.port());
  auto bytes = encode_batch(make_batch("M003", 1, 5, false));
  bytes[0] = 'Z';
  client.send_raw(bytes);
  const Ack ack = client.read_ack();
  EXPECT_EQ(ack.status, AckStatus::kRejected);
  EXPECT_EQ(ack.reason, "BadMagic");
  EXPECT_THROW(client.read_ack(), Error);
  TelemetryClient again("127.0.0.1", server.port());
  auto reversed = make_batch("M003", 2, 5, false);
  std::reverse(reversed.frames.begin(), reversed.frames.end());
  const Ack r = again.send(reversed);
  EXPECT_EQ(r.status, AckStatus::kRejected);
  EXPECT_EQ(r.reason, "OutOfOrder");
  server.stop();
  EXPECT_EQ(store.total_frames(), 0u);
}

TEST(FrameJson, RoundTripPreservesMissingAndDoubles) {
  for (const auto& f : vg_test::synthetic_frames("M004", 200, 8, 0.3)) {
    EXPECT_EQ(frame_from_json(frame_to_json(f)), f);
  }
  const SensorFrame g = frame_from_json(
      R"({"timestamp": 5, "machine_id": "X", "vibration": null, "temperature": 1.5, "current": 2, "interactions": 3})");
  EXPECT_EQ(g.machine_id, "X");
  EXPECT_FALSE(g.vibration.has_value());
  EXPECT_EQ(*g.interactions, 3);
}
