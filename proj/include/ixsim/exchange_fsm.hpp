#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ixsim/mechanism.hpp"
#include "ixsim/scene.hpp"

namespace ixsim
{

enum class TaskKind { Attach, Detach, FullCycle };

/// Exchange phases. The attach path runs AttachIdle..Attached, the detach
/// path Carrying..Detached; a full cycle chains detach into attach.
enum class Phase {
  AttachIdle,
  Aligning,
  Feeding,
  Locked,
  WithdrawingCarrying,
  Attached,
  Carrying,
  Returning,
  Inserting,
  ReleaseTriggered,
  WithdrawingEmpty,
  Detached,
  Failed,
};

enum class FailureMode {
  TiltedInsertionNoTrigger,
  AxialMisalignmentCollision,
  BaseSlippage,
  AdjacentEjection,
  RetractRetry,
};

inline constexpr FailureMode kAllFailureModes[] = {
  FailureMode::TiltedInsertionNoTrigger, FailureMode::AxialMisalignmentCollision,
  FailureMode::BaseSlippage, FailureMode::AdjacentEjection, FailureMode::RetractRetry};

enum class EventKind { PhaseEntry, Mechanism, Command };

struct TrialEvent
{
  std::int64_t tick = 0;
  double sim_time = 0.0;
  EventKind kind = EventKind::PhaseEntry;
  /// Phase name for PhaseEntry, mechanism or command label otherwise.
  std::string name;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  /// Failure mode carried by a Failed phase-entry event.
  std::optional<FailureMode> failure() const;

  friend bool operator==(const TrialEvent &, const TrialEvent &) = default;
};

using TrialEvents = std::vector<TrialEvent>;

struct FsmConfig
{
  double corridor_mm = 20.0;           ///< axial reach of the approach corridor before the mouth
  double retract_hysteresis_mm = 1.0;  ///< net retreat that counts as a retry
  double withdraw_clearance_mm = 30.0; ///< retreat that completes a withdrawal
  MechanismConfig mechanism;
};

struct FsmState
{
  TaskKind task = TaskKind::Attach;
  Phase phase = Phase::AttachIdle;
  std::optional<FailureMode> failure;
  int target_bay = 0;              ///< bay the current half of the task works on
  std::optional<int> attach_bay;   ///< bay holding the instrument to pick up
  std::optional<int> detach_bay;   ///< empty bay receiving the carried instrument
  bool clock_started = false;
  double prev_depth = 0.0;         ///< axial depth at the previous tick
  double max_depth = 0.0;          ///< deepest point reached in the current feed/insert
  double anchor_depth = 0.0;       ///< depth at lock/release, origin of the withdrawal
  bool no_engage_reported = false;

  bool terminal() const;
  bool succeeded() const;

  friend bool operator==(const FsmState &, const FsmState &) = default;
};

class TaskMismatch : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Arms a trial for `task` against `scene`. The trial clock does not start
/// until the first movement command. Throws TaskMismatch when the scene does
/// not fit the task.
FsmState start_trial(TaskKind task, const SceneState & scene);

struct StepResult
{
  FsmState fsm;
  SceneState scene;
  TrialEvents events;
};

/// Advances the phase machine by one tick. `scene` is the state after
/// `cmd` was applied; mechanism outcomes are evaluated from its geometry.
/// Abnormal situations route to Failed, never to an exception.
StepResult transition(
  const FsmState & fsm, const SceneState & scene, const PoseCommand & cmd,
  const FsmConfig & config);

/// First failure mode in event order, if any.
std::optional<FailureMode> classify_failure(const TrialEvents & events);

const char * to_string(TaskKind t);
const char * to_string(Phase p);
const char * to_string(FailureMode m);
TaskKind task_from_string(const std::string & s);
Phase phase_from_string(const std::string & s);
FailureMode failure_mode_from_string(const std::string & s);
const char * to_string(EventKind k);
EventKind event_kind_from_string(const std::string & s);

}  // namespace ixsim
