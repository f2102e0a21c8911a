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

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "json.hpp"
#include "vendguard/error.hpp"
#include "vendguard/types.hpp"

namespace vendguard::internal {

using nlohmann::json;

json frame_to_value(const SensorFrame& frame);
SensorFrame frame_from_value(const json& value);
// Rejects negative vibration, current or interaction counts.
void validate_frame(const SensorFrame& frame);

inline void append_double(std::string& out, double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

// Non-finite reals have no JSON spelling; they become null.
inline json real_or_null(double value) {
  return std::isfinite(value) ? json(value) : json(nullptr);
}

inline double real_or_nan(const json& value) {
  return value.is_null() ? std::numeric_limits<double>::quiet_NaN()
                         : value.get<double>();
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::kFormat, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text);

}  // namespace vendguard::internal
