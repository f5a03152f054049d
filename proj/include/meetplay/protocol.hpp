#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "meetplay/catalog.hpp"
#include "meetplay/games.hpp"
#include "meetplay/pose.hpp"

namespace meetplay {

inline constexpr int kProtocolVersion = 1;

/// Envelope: {"v":1,"type":"...","seq":N,"ts":MS,"sid":"...","payload":{...}}
struct WireMessage {
  int v = kProtocolVersion;
  std::string type;
  std::uint64_t seq = 0;
  std::int64_t ts = 0;
  std::string sid;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

std::string encode(const WireMessage& message);

/// Throws Error("malformed-json") for unparseable text or a bad envelope and
/// Error("bad-version") for any version other than 1.
WireMessage decode(std::string_view raw);

// Client -> server payloads. Unknown fields are ignored when parsing.

struct HelloPayload {
  std::string nickname;
  friend bool operator==(const HelloPayload&, const HelloPayload&) = default;
};

struct JoinPayload {
  /// Empty joins the server's default session.
  std::string sid;
  friend bool operator==(const JoinPayload&, const JoinPayload&) = default;
};

struct PosePayload {
  std::uint64_t t_ms = 0;
  /// Keypoints missing from the message arrive with confidence 0.
  KeypointSet keypoints;
  friend bool operator==(const PosePayload&, const PosePayload&) = default;
};

struct StartGamePayload {
  GameKind game = GameKind::Frost;
  MeetingMoment trigger = MeetingMoment::Break;
  friend bool operator==(const StartGamePayload&, const StartGamePayload&) = default;
};

struct LeavePayload {
  friend bool operator==(const LeavePayload&, const LeavePayload&) = default;
};

/// Ends the running episode early (Frost has no natural end).
struct EndGamePayload {
  friend bool operator==(const EndGamePayload&, const EndGamePayload&) = default;
};

using ClientPayload = std::variant<HelloPayload, JoinPayload, PosePayload, StartGamePayload,
                                   LeavePayload, EndGamePayload>;

std::string_view message_type(const ClientPayload& payload);
nlohmann::json payload_json(const ClientPayload& payload);

/// Throws Error("unknown-type") or Error("invalid-payload").
ClientPayload parse_client_payload(const WireMessage& message);

WireMessage make_message(const ClientPayload& payload, std::uint64_t seq, std::int64_t ts,
                         std::string sid = {});

nlohmann::json keypoints_json(const KeypointSet& keypoints);
/// Throws Error("invalid-payload").
KeypointSet keypoints_from_json(const nlohmann::json& j);

}  // namespace meetplay
