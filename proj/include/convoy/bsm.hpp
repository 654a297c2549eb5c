// Basic Safety Message: the unit of V2V state exchange, plus its wire codec.
//
// One message is one UTF-8 JSON object per datagram. The field names on the
// wire match the struct members exactly; J2735 binary encoding is out of
// scope by design.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace convoy {

struct BasicSafetyMessage {
  int car = 0;            // convoy position index, 0 = leader
  std::uint64_t seq = 0;  // per-sender monotone counter
  double t = 0.0;         // seconds since epoch
  double lat = 0.0;       // degrees
  double lon = 0.0;       // degrees
  double heading = 0.0;   // degrees clockwise from true north, in [0, 360)
  double speed = 0.0;     // m/s, >= 0
  std::map<std::string, int> event_flags{{"car", 0}};

  bool operator==(const BasicSafetyMessage&) const = default;
};

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Returns an empty string when the message satisfies its invariants,
/// otherwise a human-readable reason.
inline std::string validate_bsm(const BasicSafetyMessage& m) {
  if (m.car < 0) return "car index must be non-negative";
  if (!std::isfinite(m.t)) return "t must be finite";
  if (!std::isfinite(m.lat) || std::abs(m.lat) > 90.0) return "lat out of range [-90, 90]";
  if (!std::isfinite(m.lon) || std::abs(m.lon) > 180.0) return "lon out of range [-180, 180]";
  if (!std::isfinite(m.heading) || m.heading < 0.0 || m.heading >= 360.0)
    return "heading out of range [0, 360)";
  if (!std::isfinite(m.speed) || m.speed < 0.0) return "speed must be >= 0";
  auto it = m.event_flags.find("car");
  if (it == m.event_flags.end()) return "event_flags missing required key 'car'";
  if (it->second != m.car) return "event_flags['car'] does not match sender index";
  return {};
}

inline std::string encode_bsm(const BasicSafetyMessage& m) {
  if (auto reason = validate_bsm(m); !reason.empty()) throw EncodeError(reason);
  nlohmann::json j{{"car", m.car},     {"seq", m.seq},     {"t", m.t},
                   {"lat", m.lat},     {"lon", m.lon},     {"heading", m.heading},
                   {"speed", m.speed}, {"event_flags", m.event_flags}};
  return j.dump();
}

inline BasicSafetyMessage decode_bsm(const std::string& datagram) {
  nlohmann::json j = nlohmann::json::parse(datagram, nullptr, false);
  if (j.is_discarded()) throw DecodeError("malformed datagram: not valid JSON");
  if (!j.is_object()) throw DecodeError("malformed datagram: top level is not an object");

  auto need = [&](const char* key) -> const nlohmann::json& {
    auto it = j.find(key);
    if (it == j.end()) throw DecodeError(std::string("missing field '") + key + "'");
    return *it;
  };
  auto as_number = [&](const char* key) {
    const auto& v = need(key);
    if (!v.is_number()) throw DecodeError(std::string("field '") + key + "' is not a number");
    return v.get<double>();
  };

  BasicSafetyMessage m;
  const auto& car = need("car");
  if (!car.is_number_integer()) throw DecodeError("field 'car' is not an integer");
  m.car = car.get<int>();
  const auto& seq = need("seq");
  if (!seq.is_number_unsigned() && !(seq.is_number_integer() && seq.get<std::int64_t>() >= 0))
    throw DecodeError("field 'seq' is not a non-negative integer");
  m.seq = seq.get<std::uint64_t>();
  m.t = as_number("t");
  m.lat = as_number("lat");
  m.lon = as_number("lon");
  m.heading = as_number("heading");
  m.speed = as_number("speed");
  const auto& flags = need("event_flags");
  if (!flags.is_object()) throw DecodeError("field 'event_flags' is not an object");
  m.event_flags.clear();
  for (const auto& [key, value] : flags.items()) {
    if (!value.is_number_integer()) throw DecodeError("event_flags values must be integers");
    m.event_flags[key] = value.get<int>();
  }
  if (auto reason = validate_bsm(m); !reason.empty()) throw DecodeError(reason);
  return m;
}

}  // namespace convoy
