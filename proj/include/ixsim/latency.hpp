#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "ixsim/rng.hpp"

namespace ixsim
{

/// Impairment applied to one direction of the master-slave link.
struct ChannelConfig
{
  double base_latency_ms = 0.0;
  double jitter_ms = 0.0;   ///< half-width of the uniform jitter
  double drop_rate = 0.0;   ///< probability a frame vanishes, in [0, 1)
  std::uint64_t seed = 0;

  bool valid() const;
};

struct TimedFrame
{
  double time_ms = 0.0;
  std::string bytes;

  friend bool operator==(const TimedFrame &, const TimedFrame &) = default;
};

/// Delay line with in-order release. Each frame is held for
/// base + U(-jitter, +jitter) (never less than zero), then pushed back if
/// needed so it is not released before its predecessor.
class LatencyChannel
{
public:
  explicit LatencyChannel(const ChannelConfig & config);

  /// Queues a frame sent at `send_ms`. Returns false if the frame was dropped.
  bool push(std::string frame, double send_ms);

  /// Frames whose release time is <= now_ms, in send order.
  std::vector<TimedFrame> pop_ready(double now_ms);

  std::optional<double> next_release_ms() const;
  bool empty() const { return queue_.empty(); }
  const ChannelConfig & config() const { return config_; }

private:
  ChannelConfig config_;
  Rng rng_;
  std::deque<TimedFrame> queue_;
  double last_release_ms_ = 0.0;
  bool any_pushed_ = false;
};

/// Batch form: applies the channel to a send-ordered stream and returns the
/// surviving frames stamped with their release times.
std::vector<TimedFrame> inject_latency(
  const ChannelConfig & config, const std::vector<TimedFrame> & sent);

}  // namespace ixsim
