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

#include "vendguard/wire/codec.hpp"

#include <algorithm>

#include "json_internal.hpp"
#include "vendguard/frame_codec.hpp"
#include "vendguard/wire/deflate.hpp"

namespace vendguard::wire {

namespace {

using internal::json;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint64_t get_be(std::span<const std::uint8_t> bytes, std::size_t offset, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 8) | bytes[offset + i];
  return v;
}

void put_machine_id(std::vector<std::uint8_t>& out, const MachineId& id) {
  if (id.size() > kMachineIdBytes) {
    throw WireError(WireErrc::kInvalidBatch, "machine id '" + id + "' exceeds 16 bytes");
  }
  if (id.find('\0') != std::string::npos) {
    throw WireError(WireErrc::kInvalidBatch, "machine id contains NUL");
  }
  out.insert(out.end(), id.begin(), id.end());
  out.insert(out.end(), kMachineIdBytes - id.size(), 0);
}

MachineId get_machine_id(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::size_t len = kMachineIdBytes;
  while (len > 0 && bytes[offset + len - 1] == 0) --len;
  return MachineId(reinterpret_cast<const char*>(bytes.data() + offset), len);
}

void check_prefix(std::span<const std::uint8_t> bytes, std::size_t header_bytes) {
  if (bytes.size() >= 2 && (bytes[0] != kMagic[0] || bytes[1] != kMagic[1])) {
    throw WireError(WireErrc::kBadMagic, "expected 'VG'");
  }
  if (bytes.size() < header_bytes) {
    throw WireError(WireErrc::kLengthMismatch,
                    "header needs " + std::to_string(header_bytes) + " bytes, got " +
                        std::to_string(bytes.size()));
  }
  if (bytes[2] != kVersion) {
    throw WireError(WireErrc::kUnsupportedVersion, "version " + std::to_string(bytes[2]));
  }
}

}  // namespace

std::string_view to_string(WireErrc code) {
  switch (code) {
    case WireErrc::kBadMagic: return "BadMagic";
    case WireErrc::kUnsupportedVersion: return "UnsupportedVersion";
    case WireErrc::kLengthMismatch: return "LengthMismatch";
    case WireErrc::kCorruptPayload: return "CorruptPayload";
    case WireErrc::kInvalidBatch: return "InvalidBatch";
  }
  return "?";
}

std::string frames_payload_json(const std::vector<SensorFrame>& frames) {
  std::string out = "[";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i) out += ',';
    append_frame_json(out, frames[i]);
  }
  out += ']';
  return out;
}

std::vector<std::uint8_t> encode_batch(const TelemetryBatch& batch) {
  const std::string json_text = frames_payload_json(batch.frames);
  const std::span<const std::uint8_t> raw(reinterpret_cast<const std::uint8_t*>(json_text.data()),
                                          json_text.size());
  std::vector<std::uint8_t> payload;
  if (batch.compressed) {
    payload = deflate_raw(raw);
  } else {
    payload.assign(raw.begin(), raw.end());
  }
  if (payload.size() > kMaxPayloadBytes) {
    throw WireError(WireErrc::kInvalidBatch, "payload exceeds maximum size");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kBatchHeaderBytes + payload.size());
  out.push_back(kMagic[0]);
  out.push_back(kMagic[1]);
  out.push_back(kVersion);
  put_machine_id(out, batch.machine_id);
  put_u64(out, batch.sequence_number);
  out.push_back(batch.compressed ? kFlagCompressed : 0);
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

BatchHeader decode_batch_header(std::span<const std::uint8_t> bytes) {
  check_prefix(bytes, kBatchHeaderBytes);
  BatchHeader h;
  h.machine_id = get_machine_id(bytes, 3);
  h.sequence_number = get_be(bytes, 19, 8);
  h.flags = bytes[27];
  h.payload_length = static_cast<std::uint32_t>(get_be(bytes, 28, 4));
  return h;
}

TelemetryBatch decode_batch(std::span<const std::uint8_t> bytes) {
  const BatchHeader h = decode_batch_header(bytes);
  if (bytes.size() != kBatchHeaderBytes + h.payload_length) {
    throw WireError(WireErrc::kLengthMismatch,
                    "declared payload " + std::to_string(h.payload_length) + " bytes, have " +
                        std::to_string(bytes.size() - kBatchHeaderBytes));
  }
  if ((h.flags & ~kFlagCompressed) != 0) {
    throw WireError(WireErrc::kCorruptPayload, "unknown flag bits");
  }
  TelemetryBatch batch;
  batch.machine_id = h.machine_id;
  batch.sequence_number = h.sequence_number;
  batch.compressed = (h.flags & kFlagCompressed) != 0;
  const auto payload = bytes.subspan(kBatchHeaderBytes);
  std::vector<std::uint8_t> inflated;
  std::string_view text;
  if (batch.compressed) {
    inflated = inflate_raw(payload, kMaxPayloadBytes * 8);
    text = std::string_view(reinterpret_cast<const char*>(inflated.data()), inflated.size());
  } else {
    text = std::string_view(reinterpret_cast<const char*>(payload.data()), payload.size());
  }
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw WireError(WireErrc::kCorruptPayload, e.what());
  }
  if (!arr.is_array()) throw WireError(WireErrc::kCorruptPayload, "payload is not a JSON array");
  batch.frames.reserve(arr.size());
  for (const json& item : arr) {
    try {
      batch.frames.push_back(internal::frame_from_value(item));
    } catch (const Error& e) {
      throw WireError(WireErrc::kCorruptPayload, e.what());
    }
    if (batch.frames.back().machine_id != batch.machine_id) {
      throw WireError(WireErrc::kCorruptPayload, "frame machine id differs from header");
    }
  }
  return batch;
}

std::vector<std::uint8_t> encode_ack(const Ack& ack) {
  if (ack.reason.size() > 0xFFFF) throw WireError(WireErrc::kInvalidBatch, "ack reason too long");
  std::vector<std::uint8_t> out;
  out.reserve(kAckHeaderBytes + ack.reason.size());
  out.push_back(kMagic[0]);
  out.push_back(kMagic[1]);
  out.push_back(kVersion);
  put_machine_id(out, ack.machine_id);
  put_u64(out, ack.sequence_number);
  out.push_back(static_cast<std::uint8_t>(ack.status));
  put_u16(out, static_cast<std::uint16_t>(ack.reason.size()));
  out.insert(out.end(), ack.reason.begin(), ack.reason.end());
  return out;
}

Ack decode_ack(std::span<const std::uint8_t> bytes) {
  check_prefix(bytes, kAckHeaderBytes);
  Ack ack;
  ack.machine_id = get_machine_id(bytes, 3);
  ack.sequence_number = get_be(bytes, 19, 8);
  if (bytes[27] > 2) throw WireError(WireErrc::kCorruptPayload, "unknown ack status");
  ack.status = static_cast<AckStatus>(bytes[27]);
  const auto reason_len = static_cast<std::size_t>(get_be(bytes, 28, 2));
  if (bytes.size() != kAckHeaderBytes + reason_len) {
    throw WireError(WireErrc::kLengthMismatch, "ack reason length mismatch");
  }
  ack.reason.assign(reinterpret_cast<const char*>(bytes.data() + kAckHeaderBytes), reason_len);
  return ack;
}

std::string batch_violation(const TelemetryBatch& batch) {
  if (batch.frames.empty() || batch.frames.size() > kMaxFramesPerBatch) return "BatchSize";
  for (std::size_t i = 0; i < batch.frames.size(); ++i) {
    if (batch.frames[i].machine_id != batch.machine_id) return "MachineMismatch";
    if (i > 0 && batch.frames[i].timestamp <= batch.frames[i - 1].timestamp) return "OutOfOrder";
  }
  return {};
}

std::vector<TelemetryBatch> make_batches(const std::vector<SensorFrame>& frames,
                                         std::uint64_t first_sequence, std::size_t batch_size,
                                         bool compressed) {
  if (batch_size == 0 || batch_size > kMaxFramesPerBatch) {
    fail(Errc::kInvalidArgument, "batch size must be in [1, 60]");
  }
  std::vector<TelemetryBatch> out;
  std::uint64_t seq = first_sequence;
  for (std::size_t i = 0; i < frames.size(); i += batch_size) {
    TelemetryBatch b;
    b.machine_id = frames[i].machine_id;
    b.sequence_number = seq++;
    b.compressed = compressed;
    const std::size_t end = std::min(frames.size(), i + batch_size);
    b.frames.assign(frames.begin() + static_cast<std::ptrdiff_t>(i),
                    frames.begin() + static_cast<std::ptrdiff_t>(end));
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace vendguard::wire
