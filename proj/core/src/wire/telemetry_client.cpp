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

#include "vendguard/wire/telemetry_client.hpp"

#include <vector>

#include "vendguard/error.hpp"

namespace vendguard::wire {

void TelemetryClient::connect(const std::string& host, std::uint16_t port) {
  socket_ = connect_tcp(host, port);
}

Ack TelemetryClient::send(const TelemetryBatch& batch) {
  send_raw(encode_batch(batch));
  return read_ack();
}

void TelemetryClient::send_raw(std::span<const std::uint8_t> bytes) {
  if (!socket_.valid()) fail(Errc::kIo, "client is not connected");
  socket_.write_all(bytes);
}

Ack TelemetryClient::read_ack() {
  if (!socket_.valid()) fail(Errc::kIo, "client is not connected");
  std::vector<std::uint8_t> message(kAckHeaderBytes);
  if (!socket_.read_exact(message)) fail(Errc::kIo, "server closed connection before ack");
  const std::size_t reason_length = (std::size_t{message[28]} << 8) | message[29];
  message.resize(kAckHeaderBytes + reason_length);
  if (reason_length > 0 &&
      !socket_.read_exact(std::span(message).subspan(kAckHeaderBytes))) {
    fail(Errc::kIo, "server closed connection mid-ack");
  }
  return decode_ack(message);
}

}  // namespace vendguard::wire
