#include "meetplay/ws_server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <deque>
#include <fstream>
#include <sstream>

#include "meetplay/error.hpp"
#include "meetplay/server_core.hpp"

namespace meetplay {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

std::int64_t wall_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

}  // namespace

class WsServer::Impl : public std::enable_shared_from_this<WsServer::Impl> {
 public:
  class WsConnection;
  class HttpConnection;

  explicit Impl(ServeOptions options)
      : options_(std::move(options)),
        acceptor_(ioc_),
        timer_(ioc_),
        core_(options_.session, options_.data_dir, wall_ms(), options_.seed) {
    beast::error_code ec;
    const auto address = net::ip::make_address(options_.address, ec);
    if (ec) throw Error("io-error", "bad address " + options_.address);
    const tcp::endpoint endpoint{address, options_.port};
    acceptor_.open(endpoint.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(endpoint, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw Error("io-error", "cannot listen on " + options_.address + ":" +
                                        std::to_string(options_.port) + ": " + ec.message());
  }

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }

  void run() {
    do_accept();
    timer_.expires_after(std::chrono::milliseconds(kTickMs));
    arm_timer();
    ioc_.run();
  }

  void stop() {
    net::post(ioc_, [self = shared_from_this()] {
      beast::error_code ec;
      self->acceptor_.close(ec);
      self->timer_.cancel();
      self->live_.clear();
      self->ioc_.stop();
    });
  }

  void dispatch(const std::vector<Delivery>& deliveries);
  void connection_closed(ConnectionId id) {
    live_.erase(id);
    dispatch(core_.close_connection(id, wall_ms()));
  }

  ServerCore& core() { return core_; }
  const ServeOptions& options() const { return options_; }
  void register_connection(ConnectionId id, std::shared_ptr<WsConnection> c) { live_[id] = std::move(c); }

 private:
  void do_accept();
  void arm_timer() {
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->dispatch(self->core_.advance(wall_ms()));
      self->timer_.expires_at(self->timer_.expiry() + std::chrono::milliseconds(kTickMs));
      self->arm_timer();
    });
  }

  ServeOptions options_;
  net::io_context ioc_{1};
  tcp::acceptor acceptor_;
  net::steady_timer timer_;
  ServerCore core_;
  std::map<ConnectionId, std::shared_ptr<WsConnection>> live_;
};

class WsServer::Impl::WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(std::shared_ptr<Impl> server, tcp::socket socket)
      : server_(std::move(server)), ws_(std::move(socket)) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->id_ = self->server_->core().open_connection();
      self->server_->register_connection(self->id_, self);
      self->do_read();
    });
  }

  void send(std::string text, bool close) {
    if (closing_) return;
    queue_.emplace_back(std::move(text), close);
    if (queue_.size() == 1) do_write();
  }

 private:
  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closing_ = true;
        self->server_->connection_closed(self->id_);
        return;
      }
      auto text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_->dispatch(self->server_->core().handle_client_message(self->id_, text, wall_ms()));
      if (!self->closing_) self->do_read();
    });
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front().first), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      const bool close = self->queue_.front().second;
      self->queue_.pop_front();
      if (close) {
        self->closing_ = true;
        self->queue_.clear();
        self->ws_.async_close(websocket::close_code::policy_error, [self](beast::error_code) {});
        return;
      }
      if (!self->queue_.empty()) self->do_write();
    });
  }

  std::shared_ptr<Impl> server_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::pair<std::string, bool>> queue_;
  ConnectionId id_ = 0;
  bool closing_ = false;
};

class WsServer::Impl::HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(std::shared_ptr<Impl> server, tcp::socket socket)
      : server_(std::move(server)), stream_(std::move(socket)) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->handle();
    });
  }

 private:
  void handle() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsConnection>(server_, stream_.release_socket())->start(std::move(req_));
        return;
      }
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      respond(http::status::method_not_allowed, "text/plain", "GET only\n");
      return;
    }
    const std::string target(req_.target().substr(0, req_.target().find('?')));
    if (target == "/catalog.json") {
      const auto catalog = default_catalog();
      respond(http::status::ok, "application/json", catalog_to_json(catalog).dump(2));
      return;
    }
    if (target == "/leaderboard.json") {
      auto* store = server_->core().sessions().store();
      const auto body = store ? to_json(store->leaderboard()) : nlohmann::json::object();
      respond(http::status::ok, "application/json", body.dump(2));
      return;
    }
    const auto& root = server_->options().web_root;
    if (root && target.find("..") == std::string::npos) {
      auto path = *root / std::filesystem::path(target).relative_path();
      if (std::filesystem::is_directory(path)) path /= "index.html";
      std::ifstream in(path, std::ios::binary);
      if (in) {
        std::ostringstream body;
        body << in.rdbuf();
        respond(http::status::ok, mime_type(path), body.str());
        return;
      }
    }
    respond(http::status::not_found, "text/plain", "not found\n");
  }

  void respond(http::status status, const std::string& type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::content_type, type);
    res->set(http::field::access_control_allow_origin, "*");
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  std::shared_ptr<Impl> server_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

void WsServer::Impl::do_accept() {
  acceptor_.async_accept(ioc_, [self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<HttpConnection>(self, std::move(socket))->start();
    self->do_accept();
  });
}

void WsServer::Impl::dispatch(const std::vector<Delivery>& deliveries) {
  for (const auto& d : deliveries) {
    auto it = live_.find(d.connection);
    if (it != live_.end()) it->second->send(d.text, d.close);
  }
}

WsServer::WsServer(ServeOptions options) : impl_(std::make_shared<Impl>(std::move(options))) {}

WsServer::~WsServer() = default;

std::uint16_t WsServer::port() const { return impl_->port(); }

void WsServer::run() { impl_->run(); }

void WsServer::stop() { impl_->stop(); }

}  // namespace meetplay
