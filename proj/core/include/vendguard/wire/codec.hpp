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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vendguard/error.hpp"
#include "vendguard/types.hpp"

namespace vendguard::wire {

// Batch frame, all integers big-endian:
//   0   2  magic 'V' 'G'
//   2   1  version 0x01
//   3  16  machine_id, UTF-8, zero padded
//  19   8  sequence_number
//  27   1  flags (bit 0: payload is raw DEFLATE)
//  28   4  payload length
//  32   n  payload: JSON array of frames
//
// Ack frame:
//   0   2  magic, 2 1 version, 3 16 machine_id, 19 8 sequence_number,
//  27   1  status (0 Accepted, 1 DuplicateIgnored, 2 Rejected)
//  28   2  reason length
//  30   n  reason, UTF-8
inline constexpr std::uint8_t kMagic[2] = {0x56, 0x47};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kMachineIdBytes = 16;
inline constexpr std::size_t kBatchHeaderBytes = 32;
inline constexpr std::size_t kAckHeaderBytes = 30;
inline constexpr std::uint8_t kFlagCompressed = 0x01;
inline constexpr std::size_t kMaxFramesPerBatch = 60;
inline constexpr std::uint32_t kMaxPayloadBytes = 16u << 20;

struct TelemetryBatch {
  MachineId machine_id;
  std::uint64_t sequence_number = 0;
  std::vector<SensorFrame> frames;
  bool compressed = false;

  bool operator==(const TelemetryBatch&) const = default;
};

enum class AckStatus : std::uint8_t { kAccepted = 0, kDuplicateIgnored = 1, kRejected = 2 };

struct Ack {
  MachineId machine_id;
  std::uint64_t sequence_number = 0;
  AckStatus status = AckStatus::kAccepted;
  std::string reason;  // empty unless Rejected

  bool operator==(const Ack&) const = default;
};

enum class WireErrc { kBadMagic, kUnsupportedVersion, kLengthMismatch, kCorruptPayload, kInvalidBatch };

std::string_view to_string(WireErrc code);

class WireError : public Error {
 public:
  WireError(WireErrc kind, const std::string& message)
      : Error(Errc::kFormat, std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  WireErrc kind() const noexcept { return kind_; }

 private:
  WireErrc kind_;
};

struct BatchHeader {
  MachineId machine_id;
  std::uint64_t sequence_number = 0;
  std::uint8_t flags = 0;
  std::uint32_t payload_length = 0;
};

// Throws WireError(kInvalidBatch) if the machine id does not fit the fixed
// field or the payload would exceed kMaxPayloadBytes. Frame count and order
// are not checked here; the ingest side rejects bad batches.
std::vector<std::uint8_t> encode_batch(const TelemetryBatch& batch);
TelemetryBatch decode_batch(std::span<const std::uint8_t> bytes);
// Parses and checks magic/version of the fixed 32-byte prefix only.
BatchHeader decode_batch_header(std::span<const std::uint8_t> bytes);

// Uncompressed payload: the frames as a JSON array, no whitespace.
std::string frames_payload_json(const std::vector<SensorFrame>& frames);

std::vector<std::uint8_t> encode_ack(const Ack& ack);
Ack decode_ack(std::span<const std::uint8_t> bytes);

// Empty if the batch satisfies the TelemetryBatch invariants; otherwise a
// short reason code (BatchSize, OutOfOrder, MachineMismatch).
std::string batch_violation(const TelemetryBatch& batch);

// Cuts a series into consecutive batches of up to `batch_size` frames with
// sequence numbers first_sequence, first_sequence + 1, ...
std::vector<TelemetryBatch> make_batches(const std::vector<SensorFrame>& frames,
                                         std::uint64_t first_sequence,
                                         std::size_t batch_size = kMaxFramesPerBatch,
                                         bool compressed = true);

}  // namespace vendguard::wire
