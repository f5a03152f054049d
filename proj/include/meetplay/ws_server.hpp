#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "meetplay/session.hpp"

namespace meetplay {

struct ServeOptions {
  std::string address = "0.0.0.0";
  /// 0 picks a free port; see WsServer::port().
  std::uint16_t port = 8080;
  std::optional<std::filesystem::path> data_dir;
  /// Static files for the browser client, served at "/".
  std::optional<std::filesystem::path> web_root;
  SessionConfig session;
  std::uint64_t seed = 0;
};

/// WebSocket endpoint /ws plus GET /catalog.json and /leaderboard.json on one
/// single-threaded event loop, ticking every 50 ms.
class WsServer {
 public:
  /// Binds immediately. Throws Error("io-error") if the address is unusable.
  explicit WsServer(ServeOptions options);
  ~WsServer();

  std::uint16_t port() const;
  /// Blocks until stop() is called.
  void run();
  /// Safe to call from any thread.
  void stop();

 private:
  class Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace meetplay
