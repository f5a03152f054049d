#include "meetplay/protocol.hpp"

#include <cmath>

#include "meetplay/error.hpp"

namespace meetplay {

using nlohmann::json;

std::string encode(const WireMessage& m) {
  json j{{"v", m.v}, {"type", m.type}, {"seq", m.seq}, {"ts", m.ts}, {"sid", m.sid},
         {"payload", m.payload}};
  return j.dump();
}

WireMessage decode(std::string_view raw) {
  json j = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error("malformed-json", "message is not valid JSON");
  if (!j.is_object()) throw Error("malformed-json", "message must be a JSON object");

  auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer()) {
    throw Error("malformed-json", "envelope needs an integer 'v'");
  }
  if (v->get<std::int64_t>() != kProtocolVersion) {
    throw Error("bad-version", "unsupported protocol version " + v->dump());
  }

  WireMessage m;
  auto type = j.find("type");
  if (type == j.end() || !type->is_string()) throw Error("malformed-json", "envelope needs 'type'");
  m.type = type->get<std::string>();

  if (auto seq = j.find("seq"); seq != j.end()) {
    if (!seq->is_number_unsigned()) throw Error("malformed-json", "'seq' must be unsigned");
    m.seq = seq->get<std::uint64_t>();
  }
  if (auto ts = j.find("ts"); ts != j.end()) {
    if (!ts->is_number_integer()) throw Error("malformed-json", "'ts' must be an integer");
    m.ts = ts->get<std::int64_t>();
  }
  if (auto sid = j.find("sid"); sid != j.end() && !sid->is_null()) {
    if (!sid->is_string()) throw Error("malformed-json", "'sid' must be a string");
    m.sid = sid->get<std::string>();
  }
  if (auto payload = j.find("payload"); payload != j.end() && !payload->is_null()) {
    if (!payload->is_object()) throw Error("malformed-json", "'payload' must be an object");
    m.payload = std::move(*payload);
  }
  return m;
}

std::string_view message_type(const ClientPayload& payload) {
  struct Visitor {
    std::string_view operator()(const HelloPayload&) const { return "hello"; }
    std::string_view operator()(const JoinPayload&) const { return "join"; }
    std::string_view operator()(const PosePayload&) const { return "pose"; }
    std::string_view operator()(const StartGamePayload&) const { return "start_game"; }
    std::string_view operator()(const LeavePayload&) const { return "leave"; }
    std::string_view operator()(const EndGamePayload&) const { return "end_game"; }
  };
  return std::visit(Visitor{}, payload);
}

json keypoints_json(const KeypointSet& keypoints) {
  json out = json::object();
  for (auto id : kAllKeypoints) {
    const auto& kp = keypoints[id];
    out[std::string(keypoint_name(id))] = json::array({kp.x, kp.y, kp.confidence});
  }
  return out;
}

KeypointSet keypoints_from_json(const json& j) {
  if (!j.is_object()) throw Error("invalid-payload", "'keypoints' must be an object");
  KeypointSet set;
  for (auto id : kAllKeypoints) {
    auto it = j.find(std::string(keypoint_name(id)));
    if (it == j.end() || it->is_null()) continue;
    if (!it->is_array() || it->size() != 3) {
      throw Error("invalid-payload", std::string(keypoint_name(id)) + " must be [x,y,c]");
    }
    double v[3];
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& n = (*it)[i];
      if (!n.is_number()) throw Error("invalid-payload", "keypoint values must be numbers");
      v[i] = n.get<double>();
      if (!std::isfinite(v[i])) throw Error("invalid-payload", "keypoint values must be finite");
    }
    set.set(id, {v[0], v[1], v[2]});
  }
  return set;
}

json payload_json(const ClientPayload& payload) {
  struct Visitor {
    json operator()(const HelloPayload& p) const { return {{"nickname", p.nickname}}; }
    json operator()(const JoinPayload& p) const { return {{"sid", p.sid}}; }
    json operator()(const PosePayload& p) const {
      return {{"t_ms", p.t_ms}, {"keypoints", keypoints_json(p.keypoints)}};
    }
    json operator()(const StartGamePayload& p) const {
      return {{"game", game_name(p.game)}, {"trigger", moment_name(p.trigger)}};
    }
    json operator()(const LeavePayload&) const { return json::object(); }
    json operator()(const EndGamePayload&) const { return json::object(); }
  };
  return std::visit(Visitor{}, payload);
}

namespace {

std::string string_field(const json& payload, const char* name, bool required) {
  auto it = payload.find(name);
  if (it == payload.end() || it->is_null()) {
    if (required) throw Error("invalid-payload", std::string("missing '") + name + "'");
    return {};
  }
  if (!it->is_string()) throw Error("invalid-payload", std::string("'") + name + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

ClientPayload parse_client_payload(const WireMessage& m) {
  const json& p = m.payload;
  if (m.type == "hello") return HelloPayload{string_field(p, "nickname", true)};
  if (m.type == "join") return JoinPayload{string_field(p, "sid", false)};
  if (m.type == "pose") {
    auto t = p.find("t_ms");
    if (t == p.end() || !t->is_number_unsigned()) {
      throw Error("invalid-payload", "'t_ms' must be an unsigned integer");
    }
    auto kp = p.find("keypoints");
    if (kp == p.end()) throw Error("invalid-payload", "missing 'keypoints'");
    return PosePayload{t->get<std::uint64_t>(), keypoints_from_json(*kp)};
  }
  if (m.type == "start_game") {
    auto game = game_from_name(string_field(p, "game", true));
    if (!game) throw Error("invalid-payload", "unknown game");
    auto trigger = moment_from_name(string_field(p, "trigger", true));
    if (!trigger) throw Error("invalid-payload", "trigger must be 'break' or 'mid_meeting'");
    return StartGamePayload{*game, *trigger};
  }
  if (m.type == "leave") return LeavePayload{};
  if (m.type == "end_game") return EndGamePayload{};
  throw Error("unknown-type", "unknown message type '" + m.type + "'");
}

WireMessage make_message(const ClientPayload& payload, std::uint64_t seq, std::int64_t ts,
                         std::string sid) {
  WireMessage m;
  m.type = std::string(message_type(payload));
  m.seq = seq;
  m.ts = ts;
  m.sid = std::move(sid);
  m.payload = payload_json(payload);
  return m;
}

}  // namespace meetplay
