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
#include <vector>

namespace vendguard::wire {

// Raw DEFLATE streams (RFC 1951, no zlib or gzip wrapper), backed by zlib.
std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> input);
// Throws WireError(kCorruptPayload) on malformed input or if the output would
// exceed `max_output` bytes.
std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> input,
                                      std::size_t max_output);

}  // namespace vendguard::wire
