#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <thread>

#include "doctest.h"
#include "meetplay/protocol.hpp"
#include "meetplay/ws_server.hpp"

using namespace meetplay;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

struct RunningServer {
  WsServer server;
  std::thread thread;

  explicit RunningServer(ServeOptions options) : server(std::move(options)) {
    thread = std::thread([this] { server.run(); });
  }
  ~RunningServer() {
    server.stop();
    thread.join();
  }
};

ServeOptions local_options() {
  ServeOptions o;
  o.address = "127.0.0.1";
  o.port = 0;
  return o;
}

class Client {
 public:
  explicit Client(std::uint16_t port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/ws");
  }

  void send(const ClientPayload& p) { send_raw(encode(make_message(p, ++seq_, 0))); }
  void send_raw(const std::string& text) {
    ws_.text(true);
    ws_.write(net::buffer(text));
  }
  json read() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }
  json read_until(const std::string& type) {
    for (;;) {
      auto j = read();
      if (j["type"] == type) return j;
    }
  }
  websocket::stream<tcp::socket>& ws() { return ws_; }

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
  std::uint64_t seq_ = 0;
};

}  // namespace

TEST_CASE("websocket session end to end") {
  RunningServer running(local_options());
  const auto port = running.server.port();
  REQUIRE(port != 0);

  Client ana(port);
  ana.send(HelloPayload{"Ana"});
  ana.send(JoinPayload{});
  const auto welcome = ana.read_until("welcome");
  CHECK(welcome["v"] == 1);
  CHECK(welcome["payload"]["pid"].is_string());
  const auto roster = ana.read_until("roster");
  CHECK(roster["payload"]["participants"][0]["nickname"] == "Ana");

  ana.send(StartGamePayload{GameKind::FoodRain, MeetingMoment::Break});
  const auto started = ana.read_until("game_started");
  CHECK(started["payload"]["warning"] == false);

  ana.send_raw("{not json");
  CHECK(ana.read_until("error")["payload"]["code"] == "malformed-json");

  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t first_tick = 0;
  std::uint64_t last_tick = 0;
  int snapshots = 0;
  while (std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1)) {
    const auto snap = ana.read_until("snapshot");
    if (!snapshots) first_tick = snap["payload"]["tick"];
    last_tick = snap["payload"]["tick"];
    ++snapshots;
  }
  CHECK(snapshots >= 15);
  CHECK(last_tick - first_tick + 1 == static_cast<std::uint64_t>(snapshots));

  Client bad(port);
  bad.send_raw(R"({"v":2,"type":"hello","payload":{"nickname":"x"}})");
  CHECK(bad.read()["payload"]["code"] == "bad-version");
  beast::flat_buffer buffer;
  beast::error_code ec;
  bad.ws().read(buffer, ec);
  CHECK(ec == websocket::error::closed);
}

TEST_CASE("catalog over http") {
  RunningServer running(local_options());
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  tcp::resolver resolver(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(running.server.port())));
  http::request<http::string_body> req{http::verb::get, "/catalog.json", 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  CHECK(res.result() == http::status::ok);
  const auto body = json::parse(res.body());
  REQUIRE(body.size() == 3);
  CHECK(body[1]["game"] == "food_rain");
}
