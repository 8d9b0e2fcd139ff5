#include "ixsim/session.hpp"

#include <algorithm>

namespace ixsim
{

namespace
{

ChannelConfig derive(ChannelConfig c, std::uint64_t salt)
{
  c.seed = splitmix64(c.seed ^ salt);
  return c;
}

}  // namespace

SimulationFactory default_factory(const SimConfig & base)
{
  return [base](TaskKind task, std::uint64_t /*seed*/) {
    SimConfig cfg = base;
    cfg.scene = scene_for_task(base.scene, task);
    return std::make_unique<Simulation>(cfg, task);
  };
}

Session::Session(
  std::string session_id, const ChannelConfig & channel, SimulationFactory factory, double tick_ms)
: id_(std::move(session_id)),
  factory_(std::move(factory)),
  tick_ms_(tick_ms),
  uplink_(derive(channel, 0x75706c696e6bULL)),
  downlink_(derive(channel, 0x646f776e6c6bULL))
{
}

void Session::receive(std::string_view bytes, double now_ms)
{
  if (closing_) {
    return;
  }
  for (auto & line : decoder_.feed_lines(bytes)) {
    uplink_.push(std::move(line), now_ms);
  }
}

void Session::advance(double now_ms)
{
  while (!closing_) {
    const double frame_at = uplink_.next_release_ms().value_or(std::numeric_limits<double>::infinity());
    const double tick_at = next_tick_ms_;
    if (std::min(frame_at, tick_at) > now_ms) {
      break;
    }
    if (frame_at <= tick_at) {
      for (const auto & f : uplink_.pop_ready(frame_at)) {
        handle_frame(f.bytes, f.time_ms);
        if (closing_) {
          break;
        }
      }
    } else {
      run_tick(tick_at);
      next_tick_ms_ = tick_at + tick_ms_;
    }
  }
}

std::vector<std::string> Session::take_outgoing(double now_ms)
{
  std::vector<std::string> out;
  for (auto & f : downlink_.pop_ready(now_ms)) {
    out.push_back(std::move(f.bytes));
  }
  return out;
}

double Session::next_deadline_ms() const
{
  const double inf = std::numeric_limits<double>::infinity();
  double t = downlink_.next_release_ms().value_or(inf);
  if (!closing_) {
    t = std::min({t, next_tick_ms_, uplink_.next_release_ms().value_or(inf)});
  }
  return t;
}

void Session::teardown()
{
  if (torn_down_) {
    return;
  }
  torn_down_ = true;
  if (sim_) {
    log_.push_back(encode(sim_->snapshot()));
  }
}

void Session::handle_frame(const std::string & line, double at_ms)
{
  FrameResult r = decode_line(line);
  if (const auto * err = std::get_if<FrameError>(&r)) {
    send(ErrorFrame{"malformed", err->reason}, at_ms);
    return;
  }
  const Message & msg = std::get<Message>(r);
  if (const auto * hello = std::get_if<Hello>(&msg)) {
    handle_hello(*hello, at_ms);
  } else if (const auto * cmd = std::get_if<PoseCommand>(&msg)) {
    if (!sim_) {
      fail("no_session", "command received before hello", at_ms);
    } else if (cmd->session_id != id_) {
      fail("bad_session", "unknown session token '" + cmd->session_id + "'", at_ms);
    } else if (cmd->seq != last_received_seq_ + 1) {
      fail(
        "seq_gap",
        "expected seq " + std::to_string(last_received_seq_ + 1) + ", got " +
          std::to_string(cmd->seq),
        at_ms);
    } else {
      handle_command(*cmd);
    }
  } else {
    send(ErrorFrame{"unexpected_type", "only hello and cmd frames are accepted"}, at_ms);
  }
}

void Session::handle_hello(const Hello & hello, double at_ms)
{
  if (sim_) {
    send(ErrorFrame{"duplicate_hello", "session already open"}, at_ms);
    return;
  }
  TaskKind task;
  try {
    task = task_from_string(hello.task);
  } catch (const std::exception & e) {
    fail("bad_task", e.what(), at_ms);
    return;
  }
  try {
    sim_ = factory_(task, hello.seed);
  } catch (const std::exception & e) {
    fail("bad_config", e.what(), at_ms);
    return;
  }
  send(Hello{id_, to_string(task), hello.seed}, at_ms);
  StateUpdate initial = sim_->snapshot();
  initial.events_since_last = sim_->events();
  const std::string frame = encode(initial);
  log_.push_back(frame);
  downlink_.push(frame, at_ms);
  next_tick_ms_ = at_ms + tick_ms_;
}

void Session::handle_command(const PoseCommand & cmd)
{
  last_received_seq_ = cmd.seq;
  pending_.push_back(cmd);
}

void Session::run_tick(double at_ms)
{
  PoseCommand cmd;
  if (pending_.empty()) {
    cmd.seq = sim_->last_seq();
    cmd.session_id = id_;
  } else {
    cmd = std::move(pending_.front());
    pending_.pop_front();
  }
  const std::string frame = encode(sim_->step(cmd));
  log_.push_back(frame);
  downlink_.push(frame, at_ms);
}

void Session::send(const Message & msg, double at_ms)
{
  downlink_.push(encode(msg), at_ms);
}

void Session::fail(const std::string & code, const std::string & message, double at_ms)
{
  send(ErrorFrame{code, message}, at_ms);
  closing_ = true;
}

}  // namespace ixsim
