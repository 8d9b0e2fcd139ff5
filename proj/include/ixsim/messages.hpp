#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ixsim/exchange_fsm.hpp"
#include "ixsim/scene.hpp"

namespace ixsim
{

/// Session handshake. The client sends task and seed; the server answers
/// with the same fields plus the session token to quote in every command.
struct Hello
{
  std::string session_id;
  std::string task = "attach";
  std::uint64_t seed = 0;

  friend bool operator==(const Hello &, const Hello &) = default;
};

struct BaySnapshot
{
  int id = 0;
  Pose slot_pose;
  std::optional<int> occupied_by;
  bool limit_switch_pressed = false;
  double seat_depth_mm = 0.0;

  friend bool operator==(const BaySnapshot &, const BaySnapshot &) = default;
};

struct InstrumentSnapshot
{
  int id = 0;
  InstrumentLocation location = InstrumentLocation::Stowed;
  int bay = -1;
  Pose base_pose;

  friend bool operator==(const InstrumentSnapshot &, const InstrumentSnapshot &) = default;
};

/// Slave-to-master feedback for one tick.
struct StateUpdate
{
  std::uint64_t seq = 0;  ///< last applied command
  double sim_time = 0.0;
  std::int64_t tick = 0;
  Pose arm_tip;
  Phase phase = Phase::AttachIdle;
  std::optional<FailureMode> failure;
  int target_bay = 0;
  AlignmentError alignment;  ///< tip misalignment against the target bay
  std::vector<BaySnapshot> bays;
  std::vector<InstrumentSnapshot> instruments;
  TrialEvents events_since_last;
  bool base_stable = true;

  friend bool operator==(const StateUpdate &, const StateUpdate &) = default;
};

struct ErrorFrame
{
  std::string code;
  std::string message;

  friend bool operator==(const ErrorFrame &, const ErrorFrame &) = default;
};

using Message = std::variant<Hello, PoseCommand, StateUpdate, ErrorFrame>;

}  // namespace ixsim
