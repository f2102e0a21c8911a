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
#include <string>
#include <string_view>

#include "vendguard/types.hpp"

namespace vendguard {

// Canonical single-line JSON for one frame. Missing channels are written as
// null, reals in shortest round-trip form so that parsing restores the exact
// double.
//   {"machine_id":"M000","timestamp":1704067200,"temperature":42.1,
//    "vibration":0.203,"current":1.19,"interactions":0}
void append_frame_json(std::string& out, const SensorFrame& frame);
std::string frame_to_json(const SensorFrame& frame);

// Accepts any JSON object carrying the SensorFrame fields (key order and
// whitespace are free). The canonical layout written above is parsed on a
// fast path.
SensorFrame frame_from_json(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);
// 16 lowercase hex digits of fnv1a64.
std::string fingerprint_hex(std::string_view canonical_text);

}  // namespace vendguard
