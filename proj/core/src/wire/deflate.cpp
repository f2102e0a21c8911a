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

#include "vendguard/wire/deflate.hpp"

#include <zlib.h>

#include "vendguard/wire/codec.hpp"

namespace vendguard::wire {

namespace {
constexpr int kRawWindowBits = -15;
}

std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> input) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, kRawWindowBits, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw WireError(WireErrc::kInvalidBatch, "deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(input.size())));
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw WireError(WireErrc::kInvalidBatch, "deflate failed");
  out.resize(produced);
  return out;
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> input,
                                      std::size_t max_output) {
  z_stream zs{};
  if (inflateInit2(&zs, kRawWindowBits) != Z_OK) {
    throw WireError(WireErrc::kCorruptPayload, "inflateInit2 failed");
  }
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[16384];
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw WireError(WireErrc::kCorruptPayload, "invalid deflate stream");
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    if (out.size() > max_output) {
      inflateEnd(&zs);
      throw WireError(WireErrc::kCorruptPayload, "inflated payload too large");
    }
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw WireError(WireErrc::kCorruptPayload, "truncated deflate stream");
    }
  }
  const bool trailing = zs.avail_in != 0;
  inflateEnd(&zs);
  if (trailing) throw WireError(WireErrc::kCorruptPayload, "bytes after deflate stream");
  return out;
}

}  // namespace vendguard::wire
