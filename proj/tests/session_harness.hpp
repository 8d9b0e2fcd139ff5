#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ixsim/protocol.hpp"
#include "ixsim/session.hpp"

namespace ixsim::testing
{

struct Delivered
{
  double time_ms;
  Message msg;
};

/// Runs a Session under a virtual clock.
class VirtualLink
{
public:
  explicit VirtualLink(ChannelConfig channel = {}, SimConfig sim = {}, std::string id = "sess")
  : session_(std::move(id), channel, default_factory(sim))
  {
  }

  void send(const Message & m) { session_.receive(encode(m), now_); }
  void send_raw(const std::string & bytes) { session_.receive(bytes, now_); }

  /// Advances virtual time to `t_ms`, collecting frames as they are released.
  void run_until(double t_ms)
  {
    while (true) {
      const double next = session_.next_deadline_ms();
      if (!(next <= t_ms)) {
        break;
      }
      now_ = std::max(now_, next);
      pump();
    }
    now_ = std::max(now_, t_ms);
    pump();
  }

  double now() const { return now_; }
  Session & session() { return session_; }
  std::vector<Delivered> & received() { return received_; }

  std::vector<StateUpdate> states() const
  {
    std::vector<StateUpdate> out;
    for (const auto & d : received_) {
      if (const auto * s = std::get_if<StateUpdate>(&d.msg)) {
        out.push_back(*s);
      }
    }
    return out;
  }

  std::vector<ErrorFrame> errors() const
  {
    std::vector<ErrorFrame> out;
    for (const auto & d : received_) {
      if (const auto * e = std::get_if<ErrorFrame>(&d.msg)) {
        out.push_back(*e);
      }
    }
    return out;
  }

  std::string session_id() const
  {
    for (const auto & d : received_) {
      if (const auto * h = std::get_if<Hello>(&d.msg)) {
        return h->session_id;
      }
    }
    return {};
  }

private:
  void pump()
  {
    session_.advance(now_);
    for (const auto & frame : session_.take_outgoing(now_)) {
      const auto r = decode_line(std::string_view(frame).substr(0, frame.size() - 1));
      received_.push_back({now_, std::get<Message>(r)});
    }
  }

  Session session_;
  double now_ = 0.0;
  std::vector<Delivered> received_;
};

}  // namespace ixsim::testing
