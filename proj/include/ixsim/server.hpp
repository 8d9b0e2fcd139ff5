#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ixsim/latency.hpp"
#include "ixsim/simulation.hpp"

namespace ixsim
{

struct ServerOptions
{
  std::string address = "127.0.0.1";
  std::uint16_t tcp_port = 7431;  ///< 0 picks a free port
  std::uint16_t ws_port = 7432;   ///< 0 picks a free port
  ChannelConfig channel;          ///< impairment for both directions; the seed is per server
  SimConfig sim;
  double tick_ms = 10.0;
  /// Writes <session id>.jsonl with the session's state frames on close.
  std::optional<std::string> log_dir;
  /// Called on the server thread after a session ends.
  std::function<void(const std::string & session_id, const std::vector<std::string> & log)>
    on_session_closed;
};

/// TCP line server plus WebSocket bridge (path /session) sharing one event
/// loop. Every connection gets its own Session.
class Server
{
public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server &) = delete;
  Server & operator=(const Server &) = delete;

  /// Binds both listeners. Throws std::system_error when a port is taken.
  void start();
  /// Runs the event loop until stop().
  void run();
  /// Thread-safe.
  void stop();

  std::uint16_t tcp_port() const;
  std::uint16_t ws_port() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ixsim
