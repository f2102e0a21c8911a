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

#include <atomic>
#include <cstdint>
#include <list>
#include <mutex>
#include <string>
#include <thread>

#include "vendguard/wire/series_store.hpp"
#include "vendguard/wire/socket.hpp"

namespace vendguard::wire {

// TCP ingestion endpoint. One thread per connection; every received batch is
// answered with exactly one Ack. A protocol violation is answered with
// Rejected(reason) and the connection is closed.
class IngestServer {
 public:
  IngestServer(SeriesStore& store, std::string host = "127.0.0.1", std::uint16_t port = 0);
  ~IngestServer();

  IngestServer(const IngestServer&) = delete;
  IngestServer& operator=(const IngestServer&) = delete;

  void start();
  // Closes the listener and every live connection, then joins all threads.
  void stop();
  std::uint16_t port() const { return port_; }

  std::uint64_t batches_received() const { return batches_received_.load(); }
  std::uint64_t connections_accepted() const { return connections_accepted_.load(); }

 private:
  struct Connection {
    Socket socket;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  void accept_loop();
  void serve(Connection& connection);
  void reap_finished();

  SeriesStore& store_;
  std::string host_;
  std::uint16_t port_;
  Socket listener_;
  std::thread acceptor_;
  std::atomic<bool> running_{false};
  std::mutex connections_mutex_;
  std::list<Connection> connections_;
  std::atomic<std::uint64_t> batches_received_{0};
  std::atomic<std::uint64_t> connections_accepted_{0};
};

}  // namespace vendguard::wire
