#pragma once

#include <optional>

#include "ixsim/exchange_fsm.hpp"
#include "ixsim/messages.hpp"
#include "ixsim/scene.hpp"

namespace ixsim
{

struct SimConfig
{
  SceneConfig scene;
  FsmConfig fsm;
};

/// Default scene layout for a task: both bays full for attach; otherwise
/// instrument 0 carried, instrument 1 in bay 1 and bay 0 empty.
SceneConfig scene_for_task(SceneConfig base, TaskKind task);

/// One trial's simulated world plus its phase machine, stepped in lockstep.
/// This is the in-process session loop; the network session wraps it.
class Simulation
{
public:
  /// `config.scene.instruments` is used as given; pass the result of
  /// scene_for_task when the layout should follow the task.
  Simulation(const SimConfig & config, TaskKind task);

  /// Applies one command, advances the phase machine, returns the feedback.
  StateUpdate step(const PoseCommand & cmd);

  /// Feedback for the current state without stepping.
  StateUpdate snapshot() const;

  const SceneState & scene() const { return scene_; }
  const FsmState & fsm() const { return fsm_; }
  const TrialEvents & events() const { return events_; }
  const SimConfig & config() const { return config_; }
  std::uint64_t last_seq() const { return last_seq_; }

private:
  StateUpdate make_update(TrialEvents recent) const;

  SimConfig config_;
  SceneState scene_;
  FsmState fsm_;
  TrialEvents events_;
  std::uint64_t last_seq_ = 0;
};

}  // namespace ixsim
