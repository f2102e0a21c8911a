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

#include "vendguard/wire/ingest_server.hpp"

#include <sys/socket.h>

#include <array>
#include <vector>

#include "vendguard/error.hpp"
#include "vendguard/wire/codec.hpp"

namespace vendguard::wire {

IngestServer::IngestServer(SeriesStore& store, std::string host, std::uint16_t port)
    : store_(store), host_(std::move(host)), port_(port) {}

IngestServer::~IngestServer() { stop(); }

void IngestServer::start() {
  if (running_.exchange(true)) return;
  listener_ = listen_tcp(host_, port_);
  port_ = local_port(listener_);
  acceptor_ = std::thread([this] { accept_loop(); });
}

void IngestServer::stop() {
  if (!running_.exchange(false)) return;
  listener_.shutdown();
  if (acceptor_.joinable()) acceptor_.join();
  listener_.close();
  std::list<Connection> live;
  {
    std::lock_guard lock(connections_mutex_);
    for (Connection& c : connections_) c.socket.shutdown();
    live.splice(live.end(), connections_);
  }
  for (Connection& c : live) {
    if (c.thread.joinable()) c.thread.join();
  }
}

void IngestServer::reap_finished() {
  std::lock_guard lock(connections_mutex_);
  for (auto it = connections_.begin(); it != connections_.end();) {
    if (it->done.load()) {
      if (it->thread.joinable()) it->thread.join();
      it = connections_.erase(it);
    } else {
      ++it;
    }
  }
}

void IngestServer::accept_loop() {
  while (running_.load()) {
    const int fd = ::accept(listener_.fd(), nullptr, nullptr);
    if (fd < 0) {
      if (!running_.load()) break;
      continue;
    }
    reap_finished();
    connections_accepted_.fetch_add(1);
    std::lock_guard lock(connections_mutex_);
    Connection& c = connections_.emplace_back();
    c.socket = Socket(fd);
    c.thread = std::thread([this, &c] { serve(c); });
  }
}

void IngestServer::serve(Connection& connection) {
  Socket& sock = connection.socket;
  auto reply = [&](const Ack& ack) { sock.write_all(encode_ack(ack)); };
  auto reject = [&](MachineId machine, std::uint64_t seq, std::string reason) {
    reply(Ack{std::move(machine), seq, AckStatus::kRejected, std::move(reason)});
  };
  try {
    std::vector<std::uint8_t> message;
    for (;;) {
      message.resize(kBatchHeaderBytes);
      if (!sock.read_exact(message)) break;
      BatchHeader header;
      try {
        header = decode_batch_header(message);
      } catch (const WireError& e) {
        reject({}, 0, std::string(to_string(e.kind())));
        break;
      }
      if (header.payload_length > kMaxPayloadBytes) {
        reject(header.machine_id, header.sequence_number, "PayloadTooLarge");
        break;
      }
      message.resize(kBatchHeaderBytes + header.payload_length);
      if (!sock.read_exact(std::span(message).subspan(kBatchHeaderBytes))) {
        if (header.payload_length != 0) break;
      }
      batches_received_.fetch_add(1);
      TelemetryBatch batch;
      try {
        batch = decode_batch(message);
      } catch (const WireError& e) {
        reject(header.machine_id, header.sequence_number, std::string(to_string(e.kind())));
        break;
      }
      const SeriesStore::AppendResult result = store_.append_batch(batch);
      reply(Ack{batch.machine_id, batch.sequence_number, result.status, result.reason});
      if (result.status == AckStatus::kRejected) break;
    }
  } catch (const Error&) {
    // Peer vanished or the server is stopping.
  }
  sock.shutdown();
  connection.done.store(true);
}

}  // namespace vendguard::wire
