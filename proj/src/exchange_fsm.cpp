#include "ixsim/exchange_fsm.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace ixsim
{

namespace
{

// Depth changes below this are numerical noise, not motion.
constexpr double kAxialEps = 1e-6;

class Stepper
{
public:
  Stepper(StepResult & r, const PoseCommand & cmd, const FsmConfig & cfg)
  : r_(r), f_(r.fsm), s_(r.scene), cmd_(cmd), cfg_(cfg), env_(cfg.mechanism.envelope)
  {
  }

  void run()
  {
    if (f_.terminal()) {
      return;
    }
    measure();
    if (!f_.clock_started) {
      if (!cmd_.is_movement()) {
        f_.prev_depth = depth_;
        return;
      }
      f_.clock_started = true;
      emit(EventKind::Command, "first_movement", {{"seq", cmd_.seq}});
      enter(f_.phase == Phase::AttachIdle ? Phase::Aligning : Phase::Returning);
    }

    switch (f_.phase) {
      case Phase::Aligning:
      case Phase::Returning:
        approach();
        break;
      case Phase::Feeding:
      case Phase::Inserting:
        feed();
        break;
      case Phase::Locked:
      case Phase::ReleaseTriggered:
      case Phase::WithdrawingCarrying:
      case Phase::WithdrawingEmpty:
        withdraw();
        break;
      default:
        break;
    }
    f_.prev_depth = depth_;
  }

private:
  void measure()
  {
    const Pose & bay = s_.bays[f_.target_bay].slot_pose;
    depth_ = axial_depth(s_.arm_tip, bay);
    err_ = alignment_error(s_.arm_tip, bay);
    step_ = depth_ - f_.prev_depth;
  }

  nlohmann::ordered_json error_payload() const
  {
    return {{"bay", f_.target_bay}, {"trans_err_mm", err_.trans_mm}, {"tilt_err_deg", err_.tilt_deg}};
  }

  void emit(EventKind kind, std::string name, nlohmann::ordered_json payload = nlohmann::ordered_json::object())
  {
    TrialEvent ev;
    ev.tick = s_.tick;
    ev.sim_time = s_.sim_time();
    ev.kind = kind;
    ev.name = std::move(name);
    ev.payload = std::move(payload);
    r_.events.push_back(std::move(ev));
  }

  void enter(Phase p, nlohmann::ordered_json payload = nlohmann::ordered_json::object())
  {
    f_.phase = p;
    emit(EventKind::PhaseEntry, to_string(p), std::move(payload));
  }

  void fail(FailureMode mode, nlohmann::ordered_json extra = nlohmann::ordered_json::object())
  {
    if (!f_.failure) {
      f_.failure = mode;
    }
    nlohmann::ordered_json payload = {{"mode", to_string(mode)}};
    for (auto & [k, v] : extra.items()) {
      payload[k] = v;
    }
    enter(Phase::Failed, std::move(payload));
  }

  void approach()
  {
    if (step_ <= kAxialEps || depth_ < -cfg_.corridor_mm ||
        err_.trans_mm >= s_.limits.capture_mm)
    {
      return;
    }
    const Phase feed_phase = f_.phase == Phase::Aligning ? Phase::Feeding : Phase::Inserting;
    if (err_.trans_mm < env_.collision_trans_threshold) {
      enter(feed_phase, error_payload());
      f_.max_depth = depth_;
      f_.no_engage_reported = false;
      feed();
    } else if (depth_ >= 0.0) {
      // Forced through the mouth outside the corridor: the rim takes the hit.
      enter(feed_phase, error_payload());
      collide();
    }
  }

  void feed()
  {
    if (depth_ < f_.max_depth - cfg_.retract_hysteresis_mm) {
      fail(FailureMode::RetractRetry, {{"retreat_mm", f_.max_depth - depth_}});
      return;
    }
    f_.max_depth = std::max(f_.max_depth, depth_);

    if (depth_ >= 0.0 && err_.trans_mm > env_.collision_trans_threshold) {
      collide();
      return;
    }
    if (depth_ < s_.limits.seat_depth_mm - kAxialEps) {
      return;
    }
    if (f_.phase == Phase::Feeding) {
      contact_attach();
    } else {
      contact_detach();
    }
  }

  void contact_attach()
  {
    const EngageOutcome outcome = try_engage_latch(err_, env_);
    if (outcome == EngageOutcome::Collision) {
      collide();
      return;
    }
    if (outcome == EngageOutcome::NoEngage) {
      if (!f_.no_engage_reported) {
        auto payload = error_payload();
        payload["outcome"] = to_string(outcome);
        emit(EventKind::Mechanism, "latch", std::move(payload));
        f_.no_engage_reported = true;
      }
      return;
    }
    auto payload = error_payload();
    payload["outcome"] = to_string(outcome);
    emit(EventKind::Mechanism, "latch", std::move(payload));

    auto & bay = s_.bays[f_.target_bay];
    if (bay.occupied_by) {
      if (Instrument * inst = s_.find_instrument(*bay.occupied_by)) {
        inst->location = InstrumentLocation::Carried;
        inst->bay = -1;
        inst->base_pose = s_.arm_tip;
      }
      bay.occupied_by.reset();
      bay.limit_switch_pressed = false;
    }
    f_.anchor_depth = depth_;
    enter(Phase::Locked, error_payload());
  }

  void contact_detach()
  {
    const bool triggered = try_trigger_limit_switch(err_, true, env_);
    auto sw = error_payload();
    sw["triggered"] = triggered;
    emit(EventKind::Mechanism, "limit_switch", std::move(sw));
    if (!triggered) {
      auto extra = error_payload();
      extra["cause"] = "limit_switch_not_triggered";
      fail(FailureMode::TiltedInsertionNoTrigger, std::move(extra));
      return;
    }

    const auto & mech = cfg_.mechanism;
    const bool released = can_release(mech.latch);
    emit(
      EventKind::Mechanism, "release",
      {{"can_release", released},
       {"f_release_n", mech.latch.f_release},
       {"release_threshold_n", release_threshold(mech.latch)}});
    if (!released) {
      // Switch pressed but the actuator cannot overcome the latch.
      auto extra = error_payload();
      extra["cause"] = "release_force_insufficient";
      fail(FailureMode::TiltedInsertionNoTrigger, std::move(extra));
      return;
    }

    auto & bay = s_.bays[f_.target_bay];
    for (auto & inst : s_.instruments) {
      if (inst.location == InstrumentLocation::Carried) {
        inst.location = InstrumentLocation::Stowed;
        inst.bay = bay.id;
        inst.base_pose = s_.arm_tip;
        bay.occupied_by = inst.id;
      }
    }
    bay.limit_switch_pressed = true;
    f_.anchor_depth = depth_;
    enter(Phase::ReleaseTriggered, error_payload());
  }

  void collide()
  {
    fail(FailureMode::AxialMisalignmentCollision, error_payload());

    const int adjacent = 1 - f_.target_bay;
    BayContext ctx;
    ctx.adjacent_bay = adjacent;
    ctx.adjacent_instrument = s_.bays[adjacent].occupied_by;
    const double feed_speed = std::max(step_, 0.0);
    const auto & mech = cfg_.mechanism;
    const CollisionEffects fx =
      collision_outcome(err_, feed_speed, ctx, mech.envelope, mech.k_contact);
    emit(
      EventKind::Mechanism, "collision",
      {{"feed_speed_mm_per_tick", feed_speed},
       {"reaction_force_n", fx.reaction_force},
       {"trans_err_mm", err_.trans_mm}});

    if (fx.base_slippage) {
      s_.base_stable = false;
      fail(FailureMode::BaseSlippage, {{"reaction_force_n", fx.reaction_force}});
    }
    if (fx.adjacent_ejection && fx.ejected_instrument) {
      if (Instrument * inst = s_.find_instrument(*fx.ejected_instrument)) {
        inst->location = InstrumentLocation::Ejected;
        inst->bay = -1;
      }
      s_.bays[adjacent].occupied_by.reset();
      s_.bays[adjacent].limit_switch_pressed = false;
      fail(
        FailureMode::AdjacentEjection,
        {{"bay", adjacent}, {"instrument", *fx.ejected_instrument}});
    }
  }

  void withdraw()
  {
    if (f_.phase == Phase::Locked || f_.phase == Phase::ReleaseTriggered) {
      if (step_ >= -kAxialEps) {
        return;
      }
      if (f_.phase == Phase::Locked) {
        enter(Phase::WithdrawingCarrying);
      } else {
        const auto & mech = cfg_.mechanism;
        emit(
          EventKind::Mechanism, "withdraw",
          {{"unlocked", true},
           {"resistance_n", withdraw_resistance(mech.interface, true, mech.latch)}});
        enter(Phase::WithdrawingEmpty);
      }
    }
    if (f_.anchor_depth - depth_ < cfg_.withdraw_clearance_mm - kAxialEps) {
      return;
    }
    if (f_.phase == Phase::WithdrawingCarrying) {
      enter(Phase::Attached);
      return;
    }
    enter(Phase::Detached);
    if (f_.task == TaskKind::FullCycle && f_.attach_bay) {
      // The attach half starts on the same tick the detach half ends.
      f_.target_bay = *f_.attach_bay;
      enter(Phase::Aligning, {{"bay", f_.target_bay}});
      measure();
    }
  }

  StepResult & r_;
  FsmState & f_;
  SceneState & s_;
  const PoseCommand & cmd_;
  const FsmConfig & cfg_;
  const ToleranceEnvelope & env_;
  double depth_ = 0.0;
  double step_ = 0.0;
  AlignmentError err_;
};

template <typename E, std::size_t N>
E from_table(const std::array<std::pair<E, const char *>, N> & table, const std::string & s,
             const char * what)
{
  for (const auto & [value, name] : table) {
    if (s == name) {
      return value;
    }
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

template <typename E, std::size_t N>
const char * to_table(const std::array<std::pair<E, const char *>, N> & table, E v)
{
  for (const auto & [value, name] : table) {
    if (value == v) {
      return name;
    }
  }
  return "unknown";
}

const std::array<std::pair<TaskKind, const char *>, 3> kTaskNames{{
  {TaskKind::Attach, "attach"},
  {TaskKind::Detach, "detach"},
  {TaskKind::FullCycle, "cycle"},
}};

const std::array<std::pair<Phase, const char *>, 13> kPhaseNames{{
  {Phase::AttachIdle, "AttachIdle"},
  {Phase::Aligning, "Aligning"},
  {Phase::Feeding, "Feeding"},
  {Phase::Locked, "Locked"},
  {Phase::WithdrawingCarrying, "WithdrawingCarrying"},
  {Phase::Attached, "Attached"},
  {Phase::Carrying, "Carrying"},
  {Phase::Returning, "Returning"},
  {Phase::Inserting, "Inserting"},
  {Phase::ReleaseTriggered, "ReleaseTriggered"},
  {Phase::WithdrawingEmpty, "WithdrawingEmpty"},
  {Phase::Detached, "Detached"},
  {Phase::Failed, "Failed"},
}};

const std::array<std::pair<FailureMode, const char *>, 5> kFailureNames{{
  {FailureMode::TiltedInsertionNoTrigger, "TiltedInsertionNoTrigger"},
  {FailureMode::AxialMisalignmentCollision, "AxialMisalignmentCollision"},
  {FailureMode::BaseSlippage, "BaseSlippage"},
  {FailureMode::AdjacentEjection, "AdjacentEjection"},
  {FailureMode::RetractRetry, "RetractRetry"},
}};

const std::array<std::pair<EventKind, const char *>, 3> kEventKindNames{{
  {EventKind::PhaseEntry, "phase"},
  {EventKind::Mechanism, "mechanism"},
  {EventKind::Command, "command"},
}};

}  // namespace

std::optional<FailureMode> TrialEvent::failure() const
{
  if (kind != EventKind::PhaseEntry || name != "Failed") {
    return std::nullopt;
  }
  const auto it = payload.find("mode");
  if (it == payload.end() || !it->is_string()) {
    return std::nullopt;
  }
  return failure_mode_from_string(it->get<std::string>());
}

bool FsmState::terminal() const
{
  switch (phase) {
    case Phase::Failed:
    case Phase::Attached:
      return true;
    case Phase::Detached:
      return task == TaskKind::Detach;
    default:
      return false;
  }
}

bool FsmState::succeeded() const
{
  if (failure) {
    return false;
  }
  return task == TaskKind::Detach ? phase == Phase::Detached : phase == Phase::Attached;
}

FsmState start_trial(TaskKind task, const SceneState & scene)
{
  FsmState f;
  f.task = task;
  const bool carrying = scene.carried() != nullptr;
  std::optional<int> empty_bay;
  std::optional<int> occupied_bay;
  for (const auto & bay : scene.bays) {
    if (bay.occupied_by) {
      if (!occupied_bay) occupied_bay = bay.id;
    } else if (!empty_bay) {
      empty_bay = bay.id;
    }
  }

  switch (task) {
    case TaskKind::Attach:
      if (carrying) {
        throw TaskMismatch("attach: the arm is already carrying an instrument");
      }
      if (!occupied_bay) {
        throw TaskMismatch("attach: no bay holds an instrument");
      }
      f.phase = Phase::AttachIdle;
      f.attach_bay = occupied_bay;
      f.target_bay = *occupied_bay;
      break;
    case TaskKind::Detach:
      if (!carrying) {
        throw TaskMismatch("detach: the arm is not carrying an instrument");
      }
      if (!empty_bay) {
        throw TaskMismatch("detach: no empty bay to return the instrument to");
      }
      f.phase = Phase::Carrying;
      f.detach_bay = empty_bay;
      f.target_bay = *empty_bay;
      break;
    case TaskKind::FullCycle:
      if (!carrying) {
        throw TaskMismatch("cycle: the arm is not carrying an instrument");
      }
      if (!empty_bay) {
        throw TaskMismatch("cycle: no empty bay to return the instrument to");
      }
      if (!occupied_bay) {
        throw TaskMismatch("cycle: no stored instrument to pick up");
      }
      f.phase = Phase::Carrying;
      f.detach_bay = empty_bay;
      f.attach_bay = occupied_bay;
      f.target_bay = *empty_bay;
      break;
  }
  f.prev_depth = axial_depth(scene.arm_tip, scene.bays[f.target_bay].slot_pose);
  return f;
}

StepResult transition(
  const FsmState & fsm, const SceneState & scene, const PoseCommand & cmd,
  const FsmConfig & config)
{
  StepResult r{fsm, scene, {}};
  Stepper(r, cmd, config).run();
  return r;
}

std::optional<FailureMode> classify_failure(const TrialEvents & events)
{
  for (const auto & ev : events) {
    if (auto mode = ev.failure()) {
      return mode;
    }
  }
  return std::nullopt;
}

const char * to_string(TaskKind t) { return to_table(kTaskNames, t); }
const char * to_string(Phase p) { return to_table(kPhaseNames, p); }
const char * to_string(FailureMode m) { return to_table(kFailureNames, m); }
const char * to_string(EventKind k) { return to_table(kEventKindNames, k); }

TaskKind task_from_string(const std::string & s)
{
  if (s == "full_cycle" || s == "FullCycle") {
    return TaskKind::FullCycle;
  }
  return from_table(kTaskNames, s, "task");
}

Phase phase_from_string(const std::string & s) { return from_table(kPhaseNames, s, "phase"); }

FailureMode failure_mode_from_string(const std::string & s)
{
  return from_table(kFailureNames, s, "failure mode");
}

EventKind event_kind_from_string(const std::string & s)
{
  return from_table(kEventKindNames, s, "event kind");
}

}  // namespace ixsim
