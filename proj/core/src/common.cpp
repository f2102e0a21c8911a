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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json_internal.hpp"
#include "vendguard/error.hpp"
#include "vendguard/frame_codec.hpp"
#include "vendguard/types.hpp"

namespace vendguard {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "invalid argument";
    case Errc::kOutOfRange: return "out of range";
    case Errc::kIo: return "i/o error";
    case Errc::kFormat: return "format error";
    case Errc::kNoSignal: return "no signal";
    case Errc::kInvalidTransition: return "invalid transition";
    case Errc::kIncompatible: return "incompatible";
    case Errc::kNumerical: return "numerical failure";
    case Errc::kNotFound: return "not found";
  }
  return "unknown";
}

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::kHeaterFailure: return "HeaterFailure";
    case FaultKind::kMotorImbalance: return "MotorImbalance";
    case FaultKind::kSensorDropout: return "SensorDropout";
  }
  return "?";
}

FaultKind fault_kind_from_string(std::string_view name) {
  if (name == "HeaterFailure") return FaultKind::kHeaterFailure;
  if (name == "MotorImbalance") return FaultKind::kMotorImbalance;
  if (name == "SensorDropout") return FaultKind::kSensorDropout;
  fail(Errc::kFormat, "unknown fault kind '" + std::string(name) + "'");
}

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::kTemperature: return "temperature";
    case Channel::kVibration: return "vibration";
    case Channel::kCurrent: return "current";
    case Channel::kInteractions: return "interactions";
  }
  return "?";
}

Channel channel_from_string(std::string_view name) {
  if (name == "temperature") return Channel::kTemperature;
  if (name == "vibration") return Channel::kVibration;
  if (name == "current") return Channel::kCurrent;
  if (name == "interactions") return Channel::kInteractions;
  fail(Errc::kFormat, "unknown channel '" + std::string(name) + "'");
}

void MachineSeries::resize(std::size_t n) {
  temperature.resize(n);
  vibration.resize(n);
  current.resize(n);
  interactions.resize(n);
}

std::vector<double>& MachineSeries::channel(Channel c) {
  switch (c) {
    case Channel::kTemperature: return temperature;
    case Channel::kVibration: return vibration;
    case Channel::kCurrent: return current;
    case Channel::kInteractions: return interactions;
  }
  return temperature;
}

const std::vector<double>& MachineSeries::channel(Channel c) const {
  return const_cast<MachineSeries*>(this)->channel(c);
}

namespace {

std::optional<double> opt(double v) {
  if (std::isnan(v)) return std::nullopt;
  return v;
}

double unopt(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SensorFrame MachineSeries::frame(std::size_t i) const {
  SensorFrame f;
  f.machine_id = machine_id;
  f.timestamp = time_at(i);
  f.temperature = opt(temperature[i]);
  f.vibration = opt(vibration[i]);
  f.current = opt(current[i]);
  if (!std::isnan(interactions[i])) {
    f.interactions = static_cast<std::int64_t>(interactions[i]);
  }
  return f;
}

std::vector<SensorFrame> MachineSeries::frames() const {
  std::vector<SensorFrame> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(frame(i));
  return out;
}

MachineSeries MachineSeries::from_frames(const std::vector<SensorFrame>& frames,
                                         std::int64_t cadence) {
  if (cadence <= 0) fail(Errc::kInvalidArgument, "cadence must be positive");
  MachineSeries s;
  s.cadence = cadence;
  if (frames.empty()) return s;
  s.machine_id = frames.front().machine_id;
  s.start = frames.front().timestamp;
  s.resize(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const SensorFrame& f = frames[i];
    if (f.timestamp != s.time_at(i)) {
      fail(Errc::kInvalidArgument,
           "frame " + std::to_string(i) + " of " + s.machine_id +
               " is off the " + std::to_string(cadence) + " s grid");
    }
    s.temperature[i] = unopt(f.temperature);
    s.vibration[i] = unopt(f.vibration);
    s.current[i] = unopt(f.current);
    s.interactions[i] = f.interactions
                            ? static_cast<double>(*f.interactions)
                            : std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

// --- frame JSON -------------------------------------------------------------

namespace {

void append_opt(std::string& out, const std::optional<double>& v) {
  if (v) {
    internal::append_double(out, *v);
  } else {
    out += "null";
  }
}

// Cursor over the canonical layout; any mismatch returns false and the caller
// falls back to the general parser.
struct CanonicalParser {
  std::string_view s;
  std::size_t pos = 0;

  bool literal(std::string_view lit) {
    if (s.substr(pos, lit.size()) != lit) return false;
    pos += lit.size();
    return true;
  }

  bool string_value(std::string& out) {
    if (pos >= s.size() || s[pos] != '"') return false;
    const std::size_t end = s.find('"', pos + 1);
    if (end == std::string_view::npos) return false;
    const std::string_view body = s.substr(pos + 1, end - pos - 1);
    if (body.find('\\') != std::string_view::npos) return false;
    out.assign(body);
    pos = end + 1;
    return true;
  }

  bool int_value(std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), out);
    if (ec != std::errc()) return false;
    pos = static_cast<std::size_t>(ptr - s.data());
    return true;
  }

  bool opt_double(std::optional<double>& out) {
    if (literal("null")) {
      out.reset();
      return true;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
    if (ec != std::errc()) return false;
    pos = static_cast<std::size_t>(ptr - s.data());
    out = v;
    return true;
  }

  bool opt_int(std::optional<std::int64_t>& out) {
    if (literal("null")) {
      out.reset();
      return true;
    }
    std::int64_t v = 0;
    if (!int_value(v)) return false;
    // A real-valued count ("3.0") is not canonical.
    if (pos < s.size() && (s[pos] == '.' || s[pos] == 'e' || s[pos] == 'E')) {
      return false;
    }
    out = v;
    return true;
  }

  bool parse(SensorFrame& f) {
    return literal("{\"machine_id\":") && string_value(f.machine_id) &&
           literal(",\"timestamp\":") && int_value(f.timestamp) &&
           literal(",\"temperature\":") && opt_double(f.temperature) &&
           literal(",\"vibration\":") && opt_double(f.vibration) &&
           literal(",\"current\":") && opt_double(f.current) &&
           literal(",\"interactions\":") && opt_int(f.interactions) &&
           literal("}") && pos == s.size();
  }
};

}  // namespace

void append_frame_json(std::string& out, const SensorFrame& f) {
  out += "{\"machine_id\":\"";
  out += f.machine_id;
  out += "\",\"timestamp\":";
  out += std::to_string(f.timestamp);
  out += ",\"temperature\":";
  append_opt(out, f.temperature);
  out += ",\"vibration\":";
  append_opt(out, f.vibration);
  out += ",\"current\":";
  append_opt(out, f.current);
  out += ",\"interactions\":";
  if (f.interactions) {
    out += std::to_string(*f.interactions);
  } else {
    out += "null";
  }
  out += '}';
}

std::string frame_to_json(const SensorFrame& frame) {
  std::string out;
  append_frame_json(out, frame);
  return out;
}

SensorFrame frame_from_json(std::string_view text) {
  while (!text.empty() && (text.back() == '\r' || text.back() == ' ' ||
                           text.back() == '\n')) {
    text.remove_suffix(1);
  }
  SensorFrame f;
  CanonicalParser fast{text};
  if (fast.parse(f)) {
    internal::validate_frame(f);
    return f;
  }
  try {
    return internal::frame_from_value(internal::json::parse(text));
  } catch (const internal::json::exception& e) {
    fail(Errc::kFormat, std::string("malformed frame: ") + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint_hex(std::string_view canonical_text) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text)));
  return buf;
}

namespace internal {

json frame_to_value(const SensorFrame& f) {
  auto o = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  json j;
  j["machine_id"] = f.machine_id;
  j["timestamp"] = f.timestamp;
  j["temperature"] = o(f.temperature);
  j["vibration"] = o(f.vibration);
  j["current"] = o(f.current);
  j["interactions"] = f.interactions ? json(*f.interactions) : json(nullptr);
  return j;
}

SensorFrame frame_from_value(const json& j) {
  if (!j.is_object()) fail(Errc::kFormat, "frame must be a JSON object");
  SensorFrame f;
  try {
    f.machine_id = j.at("machine_id").get<std::string>();
    f.timestamp = j.at("timestamp").get<std::int64_t>();
    auto real = [&](const char* key) -> std::optional<double> {
      const json& v = j.at(key);
      if (v.is_null()) return std::nullopt;
      if (!v.is_number()) fail(Errc::kFormat, std::string(key) + " not a number");
      return v.get<double>();
    };
    f.temperature = real("temperature");
    f.vibration = real("vibration");
    f.current = real("current");
    const json& n = j.at("interactions");
    if (!n.is_null()) {
      if (!n.is_number_integer()) fail(Errc::kFormat, "interactions not an integer");
      f.interactions = n.get<std::int64_t>();
    }
  } catch (const json::exception& e) {
    fail(Errc::kFormat, std::string("malformed frame: ") + e.what());
  }
  validate_frame(f);
  return f;
}

void validate_frame(const SensorFrame& f) {
  if ((f.vibration && *f.vibration < 0) || (f.current && *f.current < 0) ||
      (f.interactions && *f.interactions < 0)) {
    fail(Errc::kFormat, "negative reading in frame");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIo, "cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) fail(Errc::kIo, "write failed for " + path);
}

}  // namespace internal
}  // namespace vendguard
