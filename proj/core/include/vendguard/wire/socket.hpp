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

namespace vendguard::wire {

// Owning TCP socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }

  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      close();
      fd_ = other.release();
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close();
  // Wakes up any thread blocked on this socket.
  void shutdown();

  // Writes everything or throws vendguard::Error(kIo).
  void write_all(std::span<const std::uint8_t> bytes);
  // Reads exactly bytes.size() bytes. Returns false on orderly EOF before the
  // first byte; throws if the peer closes mid-read.
  bool read_exact(std::span<std::uint8_t> bytes);

 private:
  int fd_ = -1;
};

Socket connect_tcp(const std::string& host, std::uint16_t port);
// Binds and listens; port 0 picks an ephemeral port (see local_port).
Socket listen_tcp(const std::string& host, std::uint16_t port, int backlog = 64);
std::uint16_t local_port(const Socket& socket);

}  // namespace vendguard::wire
