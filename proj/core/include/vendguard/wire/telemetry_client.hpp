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

#include <cstdint>
#include <span>
#include <string>

#include "vendguard/wire/codec.hpp"
#include "vendguard/wire/socket.hpp"

namespace vendguard::wire {

// Blocking client: one batch out, one Ack back.
class TelemetryClient {
 public:
  TelemetryClient() = default;
  TelemetryClient(const std::string& host, std::uint16_t port) { connect(host, port); }

  void connect(const std::string& host, std::uint16_t port);
  bool connected() const { return socket_.valid(); }
  void close() { socket_.close(); }

  Ack send(const TelemetryBatch& batch);
  // Writes arbitrary bytes; used to exercise the server's error handling.
  void send_raw(std::span<const std::uint8_t> bytes);
  // Throws Error(kIo) if the server closed the connection without replying.
  Ack read_ack();

 private:
  Socket socket_;
};

}  // namespace vendguard::wire
