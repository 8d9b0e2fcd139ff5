#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ixsim/latency.hpp"
#include "ixsim/protocol.hpp"
#include "ixsim/simulation.hpp"

namespace ixsim
{

/// Builds the simulation for a new session from the client's hello.
using SimulationFactory = std::function<std::unique_ptr<Simulation>(TaskKind task, std::uint64_t seed)>;

/// Factory producing the default scene layout for each task.
SimulationFactory default_factory(const SimConfig & base);

/// One master-slave session, independent of the transport.
///
/// Time is passed in explicitly (milliseconds on any monotonic clock), so the
/// same object runs under a wall clock in the server and under a virtual clock
/// in tests. Inbound frames pass through the uplink delay line before they are
/// parsed; every tick emits one StateUpdate through the downlink delay line.
/// At most one command is consumed per tick; ticks without a queued command
/// hold the arm still.
class Session
{
public:
  Session(std::string session_id, const ChannelConfig & channel, SimulationFactory factory,
          double tick_ms = 10.0);

  /// Bytes received from the master at `now_ms`.
  void receive(std::string_view bytes, double now_ms);

  /// Runs every uplink release and tick due at or before `now_ms`.
  void advance(double now_ms);

  /// Frames whose downlink release time has passed.
  std::vector<std::string> take_outgoing(double now_ms);

  /// Earliest time at which advance() or take_outgoing() has work.
  double next_deadline_ms() const;

  /// Set after a protocol violation; the session stops processing input.
  bool closing() const { return closing_; }
  /// Closing and every queued frame has been handed out.
  bool finished() const { return closing_ && downlink_.empty(); }

  /// Records the final state in the session log. Idempotent.
  void teardown();

  const std::string & id() const { return id_; }
  bool started() const { return sim_ != nullptr; }
  const Simulation * simulation() const { return sim_.get(); }
  /// Every StateUpdate frame emitted, plus the final one written at teardown.
  const std::vector<std::string> & log() const { return log_; }

private:
  void handle_frame(const std::string & line, double at_ms);
  void handle_hello(const Hello & hello, double at_ms);
  void handle_command(const PoseCommand & cmd);
  void run_tick(double at_ms);
  void send(const Message & msg, double at_ms);
  void fail(const std::string & code, const std::string & message, double at_ms);

  std::string id_;
  SimulationFactory factory_;
  double tick_ms_;
  LatencyChannel uplink_;
  LatencyChannel downlink_;
  FrameDecoder decoder_;
  std::unique_ptr<Simulation> sim_;
  std::deque<PoseCommand> pending_;
  std::uint64_t last_received_seq_ = 0;
  double next_tick_ms_ = std::numeric_limits<double>::infinity();
  bool closing_ = false;
  bool torn_down_ = false;
  std::vector<std::string> log_;
};

}  // namespace ixsim
