#include "ixsim/latency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ixsim
{

bool ChannelConfig::valid() const
{
  return std::isfinite(base_latency_ms) && base_latency_ms >= 0.0 && std::isfinite(jitter_ms) &&
         jitter_ms >= 0.0 && drop_rate >= 0.0 && drop_rate < 1.0;
}

LatencyChannel::LatencyChannel(const ChannelConfig & config)
: config_(config), rng_(splitmix64(config.seed))
{
  if (!config_.valid()) {
    throw std::invalid_argument("channel: latency and jitter must be >= 0, drop rate in [0, 1)");
  }
}

bool LatencyChannel::push(std::string frame, double send_ms)
{
  // Draw order is fixed (drop, then jitter) so the delay sequence depends only
  // on the seed and the number of frames.
  const bool dropped = config_.drop_rate > 0.0 && rng_.bernoulli(config_.drop_rate);
  const double jitter =
    config_.jitter_ms > 0.0 ? rng_.uniform(-config_.jitter_ms, config_.jitter_ms) : 0.0;
  if (dropped) {
    return false;
  }
  double release = send_ms + std::max(0.0, config_.base_latency_ms + jitter);
  if (any_pushed_) {
    release = std::max(release, last_release_ms_);
  }
  any_pushed_ = true;
  last_release_ms_ = release;
  queue_.push_back({release, std::move(frame)});
  return true;
}

std::vector<TimedFrame> LatencyChannel::pop_ready(double now_ms)
{
  std::vector<TimedFrame> out;
  while (!queue_.empty() && queue_.front().time_ms <= now_ms) {
    out.push_back(std::move(queue_.front()));
    queue_.pop_front();
  }
  return out;
}

std::optional<double> LatencyChannel::next_release_ms() const
{
  if (queue_.empty()) {
    return std::nullopt;
  }
  return queue_.front().time_ms;
}

std::vector<TimedFrame> inject_latency(
  const ChannelConfig & config, const std::vector<TimedFrame> & sent)
{
  LatencyChannel channel(config);
  for (const auto & f : sent) {
    channel.push(f.bytes, f.time_ms);
  }
  return channel.pop_ready(std::numeric_limits<double>::infinity());
}

}  // namespace ixsim
