#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meetplay/protocol.hpp"
#include "meetplay/session.hpp"

namespace meetplay {

using ConnectionId = std::uint64_t;

struct Delivery {
  ConnectionId connection = 0;
  std::string text;
  /// Close the connection after sending.
  bool close = false;
};

/// Everything the WebSocket server does except sockets: connection bookkeeping,
/// decoding, dispatch and fan-out of session messages. Not thread safe; the
/// transport serializes calls.
class ServerCore {
 public:
  ServerCore(SessionConfig defaults, std::optional<std::filesystem::path> data_dir, std::int64_t now_ms,
             std::uint64_t seed = 0);

  ConnectionId open_connection();
  /// Never throws; protocol problems become error replies.
  std::vector<Delivery> handle_client_message(ConnectionId connection, std::string_view raw,
                                              std::int64_t now_ms);
  std::vector<Delivery> close_connection(ConnectionId connection, std::int64_t now_ms);
  std::vector<Delivery> advance(std::int64_t now_ms);

  SessionManager& sessions() { return sessions_; }
  const std::string& default_session() const { return default_session_; }
  std::size_t connection_count() const { return connections_.size(); }

 private:
  struct Connection {
    std::string nickname;
    std::string sid;
    ParticipantId pid;
    std::uint64_t out_seq = 0;
  };

  void dispatch(ConnectionId id, Connection& conn, const WireMessage& message, std::int64_t now_ms,
                std::vector<Delivery>& deliveries);
  void deliver(const std::string& sid, const Outbox& out, std::int64_t now_ms,
               std::vector<Delivery>& deliveries);
  void send(ConnectionId id, const std::string& sid, std::string type, nlohmann::json payload,
            std::int64_t now_ms, std::vector<Delivery>& deliveries, bool close = false);

  SessionManager sessions_;
  std::string default_session_;
  std::map<ConnectionId, Connection> connections_;
  ConnectionId next_connection_ = 0;
};

}  // namespace meetplay
