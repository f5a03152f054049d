#include "meetplay/server_core.hpp"

#include "meetplay/error.hpp"

namespace meetplay {

using nlohmann::json;

ServerCore::ServerCore(SessionConfig defaults, std::optional<std::filesystem::path> data_dir,
                       std::int64_t now_ms, std::uint64_t seed)
    : sessions_(std::move(data_dir), seed) {
  default_session_ = sessions_.create_session(defaults, now_ms);
}

ConnectionId ServerCore::open_connection() {
  const auto id = ++next_connection_;
  connections_.emplace(id, Connection{});
  return id;
}

void ServerCore::send(ConnectionId id, const std::string& sid, std::string type, json payload,
                      std::int64_t now_ms, std::vector<Delivery>& deliveries, bool close) {
  auto it = connections_.find(id);
  if (it == connections_.end()) return;
  WireMessage m;
  m.type = std::move(type);
  m.seq = ++it->second.out_seq;
  m.ts = now_ms;
  m.sid = sid;
  m.payload = std::move(payload);
  deliveries.push_back({id, encode(m), close});
}

void ServerCore::deliver(const std::string& sid, const Outbox& out, std::int64_t now_ms,
                         std::vector<Delivery>& deliveries) {
  for (const auto& msg : out) {
    for (const auto& [id, conn] : connections_) {
      if (conn.sid != sid || conn.pid.empty()) continue;
      if (msg.to && *msg.to != conn.pid) continue;
      send(id, sid, msg.type, msg.payload, now_ms, deliveries);
    }
  }
}

std::vector<Delivery> ServerCore::handle_client_message(ConnectionId id, std::string_view raw,
                                                        std::int64_t now_ms) {
  std::vector<Delivery> deliveries;
  auto it = connections_.find(id);
  if (it == connections_.end()) return deliveries;
  const auto reply_error = [&](const std::string& code, const std::string& msg, bool close) {
    send(id, it->second.sid, "error", {{"code", code}, {"msg", msg}}, now_ms, deliveries, close);
  };
  try {
    dispatch(id, it->second, decode(raw), now_ms, deliveries);
  } catch (const Error& e) {
    reply_error(e.code(), e.what(), e.code() == "bad-version");
  } catch (const std::exception& e) {
    reply_error("internal", e.what(), false);
  }
  return deliveries;
}

void ServerCore::dispatch(ConnectionId id, Connection& conn, const WireMessage& message,
                          std::int64_t now_ms, std::vector<Delivery>& deliveries) {
  const auto payload = parse_client_payload(message);
  const auto require_joined = [&]() -> Session& {
    if (conn.pid.empty()) throw Error("not-joined", "join a session first");
    return sessions_.get(conn.sid);
  };
  Outbox out;

  if (const auto* hello = std::get_if<HelloPayload>(&payload)) {
    if (!conn.pid.empty()) throw Error("already-joined", "hello after join");
    conn.nickname = normalize_nickname(hello->nickname);
    return;
  }
  if (const auto* join = std::get_if<JoinPayload>(&payload)) {
    if (!conn.pid.empty()) throw Error("already-joined", "connection already joined " + conn.sid);
    if (conn.nickname.empty()) throw Error("hello-required", "send hello with a nickname first");
    if (join->sid.empty() && sessions_.get(default_session_).phase() == Phase::Ended) {
      default_session_ = sessions_.create_session(sessions_.get(default_session_).config(), now_ms);
    }
    const auto sid = join->sid.empty() ? default_session_ : join->sid;
    const auto pid = sessions_.join(sid, conn.nickname, out);
    conn.sid = sid;
    conn.pid = pid;
    send(id, sid, "welcome", {{"pid", pid}, {"sid", sid}}, now_ms, deliveries);
  } else if (const auto* pose = std::get_if<PosePayload>(&payload)) {
    require_joined().queue_pose({conn.pid, pose->t_ms, pose->keypoints});
    return;
  } else if (const auto* start = std::get_if<StartGamePayload>(&payload)) {
    require_joined().start_game(start->game, start->trigger, out);
  } else if (std::holds_alternative<EndGamePayload>(payload)) {
    require_joined().end_game(out);
  } else if (std::holds_alternative<LeavePayload>(payload)) {
    auto& session = require_joined();
    const auto sid = conn.sid;
    const auto pid = conn.pid;
    conn.pid.clear();
    conn.sid.clear();
    session.leave(pid, out);
    deliver(sid, out, now_ms, deliveries);
    return;
  }
  deliver(conn.sid, out, now_ms, deliveries);
}

std::vector<Delivery> ServerCore::close_connection(ConnectionId id, std::int64_t now_ms) {
  std::vector<Delivery> deliveries;
  auto it = connections_.find(id);
  if (it == connections_.end()) return deliveries;
  const auto conn = it->second;
  connections_.erase(it);
  if (conn.pid.empty()) return deliveries;
  try {
    Outbox out;
    sessions_.get(conn.sid).leave(conn.pid, out);
    deliver(conn.sid, out, now_ms, deliveries);
  } catch (const Error&) {
    // already gone
  }
  return deliveries;
}

std::vector<Delivery> ServerCore::advance(std::int64_t now_ms) {
  std::vector<Delivery> deliveries;
  for (const auto& sid : sessions_.ids()) {
    Outbox out;
    try {
      sessions_.get(sid).advance(now_ms, out);
    } catch (const std::exception& e) {
      out.push_back({std::nullopt, "error", {{"code", "internal"}, {"msg", e.what()}}});
    }
    deliver(sid, out, now_ms, deliveries);
  }
  return deliveries;
}

}  // namespace meetplay
