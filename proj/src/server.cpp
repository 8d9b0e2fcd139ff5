#include "ixsim/server.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "ixsim/session.hpp"

namespace ixsim
{

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using error_code = boost::system::error_code;

class Link;

struct ServerState
{
  explicit ServerState(ServerOptions o) : opt(std::move(o)), tcp_acceptor(io), ws_acceptor(io) {}

  double now_ms() const
  {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }

  std::unique_ptr<Session> make_session()
  {
    const std::uint64_t n = ++counter;
    char id[17];
    std::snprintf(id, sizeof(id), "%016llx",
                  static_cast<unsigned long long>(splitmix64(opt.channel.seed ^ (n << 32) ^ n)));
    ChannelConfig ch = opt.channel;
    ch.seed = splitmix64(opt.channel.seed + n);
    return std::make_unique<Session>(id, ch, default_factory(opt.sim), opt.tick_ms);
  }

  void session_closed(const Session & s)
  {
    if (opt.log_dir) {
      std::error_code ec;
      std::filesystem::create_directories(*opt.log_dir, ec);
      std::ofstream out(std::filesystem::path(*opt.log_dir) / (s.id() + ".jsonl"), std::ios::binary);
      for (const auto & frame : s.log()) {
        out << frame;
      }
      if (!out) {
        std::cerr << "ixsim: could not write log for session " << s.id() << "\n";
      }
    }
    if (opt.on_session_closed) {
      opt.on_session_closed(s.id(), s.log());
    }
  }

  void listen(tcp::acceptor & acc, std::uint16_t port)
  {
    const tcp::endpoint ep(asio::ip::make_address(opt.address), port);
    acc.open(ep.protocol());
    acc.set_option(asio::socket_base::reuse_address(true));
    acc.bind(ep);
    acc.listen();
  }

  void accept_tcp();
  void accept_ws();

  ServerOptions opt;
  asio::io_context io;
  tcp::acceptor tcp_acceptor;
  tcp::acceptor ws_acceptor;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::uint64_t counter = 0;
  std::vector<std::weak_ptr<Link>> links;
};

/// Transport-independent pump between a socket and its Session.
class Link : public std::enable_shared_from_this<Link>
{
public:
  Link(ServerState & server, asio::any_io_executor ex)
  : server_(server), session_(server.make_session()), timer_(ex)
  {
  }
  virtual ~Link() = default;

  virtual void start() = 0;

  void close()
  {
    if (closed_) {
      return;
    }
    closed_ = true;
    timer_.cancel();
    close_transport();
    session_->teardown();
    server_.session_closed(*session_);
  }

protected:
  void on_bytes(std::string_view bytes)
  {
    session_->receive(bytes, server_.now_ms());
    pump();
  }

  void pump()
  {
    if (closed_) {
      return;
    }
    const double now = server_.now_ms();
    session_->advance(now);
    for (auto & frame : session_->take_outgoing(now)) {
      out_.push_back(std::move(frame));
    }
    if (!writing_) {
      write_next();
    }
    if (session_->finished()) {
      close_after_flush_ = true;
      if (!writing_) {
        close();
      }
      return;
    }
    const double deadline = session_->next_deadline_ms();
    if (std::isfinite(deadline)) {
      timer_.expires_at(
        server_.t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double, std::milli>(deadline)));
      timer_.async_wait([self = shared_from_this()](const error_code & ec) {
        if (!ec) {
          self->pump();
        }
      });
    }
  }

  void write_next()
  {
    if (closed_) {
      return;
    }
    if (out_.empty()) {
      writing_ = false;
      if (close_after_flush_) {
        close();
      }
      return;
    }
    writing_ = true;
    write_frame(out_.front(), [self = shared_from_this()](const error_code & ec) {
      if (ec) {
        self->close();
        return;
      }
      self->out_.pop_front();
      self->write_next();
    });
  }

  virtual void write_frame(const std::string & frame, std::function<void(const error_code &)> done) = 0;
  virtual void close_transport() = 0;

  ServerState & server_;
  std::unique_ptr<Session> session_;
  asio::steady_timer timer_;
  std::deque<std::string> out_;
  bool writing_ = false;
  bool close_after_flush_ = false;
  bool closed_ = false;
};

class TcpLink : public Link
{
public:
  TcpLink(ServerState & server, tcp::socket socket)
  : Link(server, socket.get_executor()), socket_(std::move(socket))
  {
    socket_.set_option(tcp::no_delay(true));
  }

  void start() override
  {
    pump();
    read();
  }

private:
  void read()
  {
    socket_.async_read_some(
      asio::buffer(buf_), [self = shared_from(this)](const error_code & ec, std::size_t n) {
        if (ec) {
          self->close();
          return;
        }
        self->on_bytes(std::string_view(self->buf_.data(), n));
        if (!self->closed_) {
          self->read();
        }
      });
  }

  void write_frame(const std::string & frame, std::function<void(const error_code &)> done) override
  {
    asio::async_write(
      socket_, asio::buffer(frame),
      [done = std::move(done)](const error_code & ec, std::size_t) { done(ec); });
  }

  void close_transport() override
  {
    error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
  }

  static std::shared_ptr<TcpLink> shared_from(TcpLink * p)
  {
    return std::static_pointer_cast<TcpLink>(p->shared_from_this());
  }

  tcp::socket socket_;
  std::array<char, 4096> buf_{};
};

class WsLink : public Link
{
public:
  WsLink(ServerState & server, tcp::socket socket)
  : Link(server, socket.get_executor()), ws_(std::move(socket))
  {
  }

  void start() override
  {
    http::async_read(
      ws_.next_layer(), buf_, req_, [self = shared_from(this)](const error_code & ec, std::size_t) {
        if (ec) {
          self->close();
          return;
        }
        self->upgrade();
      });
  }

private:
  void upgrade()
  {
    if (!websocket::is_upgrade(req_) || req_.target() != "/session") {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, req_.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "websocket endpoint is /session\n";
      res->prepare_payload();
      res->keep_alive(false);
      http::async_write(
        ws_.next_layer(), *res, [self = shared_from(this), res](const error_code &, std::size_t) {
          self->rejected_ = true;
          self->close();
        });
      return;
    }
    ws_.text(true);
    ws_.async_accept(req_, [self = shared_from(this)](const error_code & ec) {
      if (ec) {
        self->close();
        return;
      }
      self->open_ = true;
      self->pump();
      self->read();
    });
  }

  void read()
  {
    ws_.async_read(buf_, [self = shared_from(this)](const error_code & ec, std::size_t) {
      if (ec) {
        self->open_ = false;
        self->close();
        return;
      }
      std::string text = beast::buffers_to_string(self->buf_.data());
      self->buf_.consume(self->buf_.size());
      if (text.empty() || text.back() != '\n') {
        text.push_back('\n');
      }
      self->on_bytes(text);
      if (!self->closed_) {
        self->read();
      }
    });
  }

  void write_frame(const std::string & frame, std::function<void(const error_code &)> done) override
  {
    // One JSON object per text message; the message boundary replaces the LF.
    std::string_view body(frame);
    if (!body.empty() && body.back() == '\n') {
      body.remove_suffix(1);
    }
    ws_.async_write(
      asio::buffer(body.data(), body.size()),
      [done = std::move(done)](const error_code & ec, std::size_t) { done(ec); });
  }

  void close_transport() override
  {
    if (open_ && !rejected_) {
      open_ = false;
      ws_.async_close(websocket::close_code::normal, [self = shared_from(this)](const error_code &) {
        error_code ignored;
        self->ws_.next_layer().close(ignored);
      });
      return;
    }
    error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
  }

  static std::shared_ptr<WsLink> shared_from(WsLink * p)
  {
    return std::static_pointer_cast<WsLink>(p->shared_from_this());
  }

  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buf_;
  http::request<http::string_body> req_;
  bool open_ = false;
  bool rejected_ = false;
};

void ServerState::accept_tcp()
{
  tcp_acceptor.async_accept([this](const error_code & ec, tcp::socket socket) {
    if (ec) {
      if (ec != asio::error::operation_aborted) {
        accept_tcp();
      }
      return;
    }
    auto link = std::make_shared<TcpLink>(*this, std::move(socket));
    links.push_back(link);
    link->start();
    accept_tcp();
  });
}

void ServerState::accept_ws()
{
  ws_acceptor.async_accept([this](const error_code & ec, tcp::socket socket) {
    if (ec) {
      if (ec != asio::error::operation_aborted) {
        accept_ws();
      }
      return;
    }
    auto link = std::make_shared<WsLink>(*this, std::move(socket));
    links.push_back(link);
    link->start();
    accept_ws();
  });
}

struct Server::Impl : ServerState
{
  using ServerState::ServerState;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() = default;

void Server::start()
{
  if (!impl_->opt.channel.valid()) {
    throw std::invalid_argument("server: channel parameters out of range");
  }
  impl_->listen(impl_->tcp_acceptor, impl_->opt.tcp_port);
  impl_->listen(impl_->ws_acceptor, impl_->opt.ws_port);
  impl_->accept_tcp();
  impl_->accept_ws();
}

void Server::run()
{
  impl_->io.run();
}

void Server::stop()
{
  asio::post(impl_->io, [impl = impl_.get()] {
    error_code ec;
    impl->tcp_acceptor.close(ec);
    impl->ws_acceptor.close(ec);
    for (auto & weak : impl->links) {
      if (auto link = weak.lock()) {
        link->close();
      }
    }
    impl->links.clear();
    impl->io.stop();
  });
}

std::uint16_t Server::tcp_port() const
{
  return impl_->tcp_acceptor.local_endpoint().port();
}

std::uint16_t Server::ws_port() const
{
  return impl_->ws_acceptor.local_endpoint().port();
}

}  // namespace ixsim
