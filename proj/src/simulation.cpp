#include "ixsim/simulation.hpp"

#include <iterator>

namespace ixsim
{

SceneConfig scene_for_task(SceneConfig base, TaskKind task)
{
  if (task == TaskKind::Attach) {
    base.instruments = {{0, 0}, {1, 1}};
  } else {
    base.instruments = {{0, -1}, {1, 1}};
  }
  return base;
}

Simulation::Simulation(const SimConfig & config, TaskKind task)
: config_(config), scene_(new_scene(config.scene)), fsm_(start_trial(task, scene_))
{
  if (!config_.fsm.mechanism.valid()) {
    throw ConfigError("mechanism parameters out of range");
  }
  TrialEvent initial;
  initial.tick = scene_.tick;
  initial.sim_time = scene_.sim_time();
  initial.kind = EventKind::PhaseEntry;
  initial.name = to_string(fsm_.phase);
  initial.payload = {{"bay", fsm_.target_bay}};
  events_.push_back(std::move(initial));
}

StateUpdate Simulation::step(const PoseCommand & cmd)
{
  SceneState moved = apply_command(scene_, cmd);
  StepResult r = transition(fsm_, moved, cmd, config_.fsm);
  scene_ = std::move(r.scene);
  fsm_ = r.fsm;
  last_seq_ = cmd.seq;
  events_.insert(events_.end(), r.events.begin(), r.events.end());
  return make_update(std::move(r.events));
}

StateUpdate Simulation::snapshot() const
{
  return make_update({});
}

StateUpdate Simulation::make_update(TrialEvents recent) const
{
  StateUpdate u;
  u.seq = last_seq_;
  u.sim_time = scene_.sim_time();
  u.tick = scene_.tick;
  u.arm_tip = scene_.arm_tip;
  u.phase = fsm_.phase;
  u.failure = fsm_.failure;
  u.target_bay = fsm_.target_bay;
  u.alignment = alignment_error(scene_.arm_tip, scene_.bays[fsm_.target_bay].slot_pose);
  u.base_stable = scene_.base_stable;
  u.bays.reserve(scene_.bays.size());
  for (const auto & bay : scene_.bays) {
    u.bays.push_back(
      {bay.id, bay.slot_pose, bay.occupied_by, bay.limit_switch_pressed,
       scene_.limits.seat_depth_mm});
  }
  u.instruments.reserve(scene_.instruments.size());
  for (const auto & inst : scene_.instruments) {
    u.instruments.push_back({inst.id, inst.location, inst.bay, inst.base_pose});
  }
  u.events_since_last = std::move(recent);
  return u;
}

}  // namespace ixsim
