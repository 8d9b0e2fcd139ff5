#include "ixsim/operators.hpp"

#include <algorithm>
#include <cmath>

namespace ixsim
{

namespace
{

constexpr double kReachedMm = 1e-6;
constexpr double kReachedDeg = 1e-6;

bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

double power_decay(double base, double alpha, int k)
{
  return base * std::pow(static_cast<double>(std::max(k, 1)), -alpha);
}

bool trial_over(const StateUpdate & obs)
{
  if (obs.phase == Phase::Failed || obs.phase == Phase::Attached) {
    return true;
  }
  // Detached ends a detach trial; in a cycle the phase moves on to Aligning
  // within the same tick, so Detached is only ever observed as terminal.
  return obs.phase == Phase::Detached;
}

// Two unit vectors spanning the plane perpendicular to `axis`.
std::pair<Eigen::Vector3d, Eigen::Vector3d> lateral_basis(const Eigen::Vector3d & axis)
{
  Eigen::Vector3d u = axis.cross(Eigen::Vector3d::UnitZ());
  if (u.norm() < 1e-9) {
    u = axis.cross(Eigen::Vector3d::UnitY());
  }
  u.normalize();
  return {u, axis.cross(u).normalized()};
}

Pose pose_delta(const Pose & from, const Pose & to)
{
  Pose d;
  d.x = to.x - from.x;
  d.y = to.y - from.y;
  d.z = to.z - from.z;
  d.pitch = normalize_angle(to.pitch - from.pitch);
  d.yaw = normalize_angle(to.yaw - from.yaw);
  d.roll = normalize_angle(to.roll - from.roll);
  return d;
}

Pose lerp(const Pose & a, const Pose & b, double t)
{
  const Pose d = pose_delta(a, b);
  Pose p = a;
  p.x += t * d.x;
  p.y += t * d.y;
  p.z += t * d.z;
  p.pitch = normalize_angle(a.pitch + t * d.pitch);
  p.yaw = normalize_angle(a.yaw + t * d.yaw);
  p.roll = normalize_angle(a.roll + t * d.roll);
  return p;
}

}  // namespace

bool OperatorParams::valid() const
{
  return nonneg(align_noise_mm0) && nonneg(align_noise_deg0) && nonneg(learn_alpha) &&
         learn_alpha <= 2.0 && nonneg(macro_transit_mean_s) && nonneg(macro_transit_std_s) &&
         feed_speed > 0.0 && std::isfinite(feed_speed) && nonneg(reaction_s) &&
         nonneg(reaction_floor_s) && accept_mm > 0.0 && accept_deg > 0.0 &&
         nonneg(landing_err_mm) && nonneg(landing_err_deg) && local_speed > 0.0 &&
         nonneg(standoff_mm) && forced_feed_prob0 >= 0.0 && forced_feed_prob0 <= 1.0 &&
         forced_feed_speed > 0.0;
}

OperatorParams expert_defaults()
{
  OperatorParams p;
  p.label = "expert";
  p.align_noise_mm0 = 0.5;
  p.align_noise_deg0 = 0.5;
  p.learn_alpha = 0.0;
  p.macro_transit_mean_s = 36.0;
  p.macro_transit_std_s = 3.6;
  p.feed_speed = 3.0;
  p.reaction_s = 1.2;
  p.reaction_floor_s = 0.5;
  p.accept_mm = 1.5;
  p.accept_deg = 2.0;
  p.landing_err_mm = 6.0;
  p.landing_err_deg = 5.0;
  p.local_speed = 1.0;
  p.forced_feed_prob0 = 0.0;
  return p;
}

OperatorParams novice_defaults()
{
  return OperatorParams{};
}

double noise_mm_at(const OperatorParams & p, int k)
{
  return power_decay(p.align_noise_mm0, p.learn_alpha, k);
}

double noise_deg_at(const OperatorParams & p, int k)
{
  return power_decay(p.align_noise_deg0, p.learn_alpha, k);
}

double reaction_at(const OperatorParams & p, int k)
{
  return std::max(p.reaction_floor_s, power_decay(p.reaction_s, p.learn_alpha, k));
}

double forced_feed_prob_at(const OperatorParams & p, int k)
{
  return power_decay(p.forced_feed_prob0, p.learn_alpha, k);
}

const char * to_string(Subgoal g)
{
  switch (g) {
    case Subgoal::Start:
      return "start";
    case Subgoal::Transit:
      return "transit";
    case Subgoal::Dwell:
      return "dwell";
    case Subgoal::Perceive:
      return "perceive";
    case Subgoal::Correct:
      return "correct";
    case Subgoal::Feed:
      return "feed";
    case Subgoal::Withdraw:
      return "withdraw";
    case Subgoal::Done:
      return "done";
  }
  return "unknown";
}

OperatorPolicy::OperatorPolicy(OperatorParams params, double dt_s)
: params_(std::move(params)), dt_s_(dt_s)
{
  if (!params_.valid()) {
    throw std::invalid_argument("operator parameters out of range");
  }
  begin_trial(1, 0);
}

void OperatorPolicy::begin_trial(int k, std::uint64_t trial_seed)
{
  state_ = PolicyState{};
  state_.k = std::max(k, 1);
  state_.rng = Rng(splitmix64(trial_seed ^ params_.seed));
}

PoseCommand OperatorPolicy::make(const Pose & delta, double axial_feed)
{
  PoseCommand cmd;
  cmd.seq = ++state_.seq;
  cmd.delta = delta;
  cmd.axial_feed = axial_feed;
  return cmd;
}

void OperatorPolicy::dwell(double seconds, Subgoal then)
{
  state_.subgoal = Subgoal::Dwell;
  state_.dwell_left = static_cast<int>(std::lround(seconds / dt_s_));
  state_.after_dwell = then;
}

void OperatorPolicy::plan_move(const Pose & from, const Pose & goal, int min_ticks)
{
  const Pose d = pose_delta(from, goal);
  const double dist = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
  const double ang = std::max({std::abs(d.pitch), std::abs(d.yaw), std::abs(d.roll)});
  const int needed = static_cast<int>(std::ceil(std::max(dist, ang) / params_.local_speed));
  state_.from = from;
  state_.goal = goal;
  state_.plan_ticks = std::max(needed, min_ticks);
  state_.plan_elapsed = 0;
}

void OperatorPolicy::start_leg(const StateUpdate & obs)
{
  auto & s = state_;
  const bool macro = s.target_bay < 0;
  s.half = macro ? 0 : 1;
  s.target_bay = obs.target_bay;
  s.aligning_tilt = true;
  s.first_perceive = true;
  s.forced = false;
  s.withdrawn_mm = 0.0;

  const BaySnapshot & bay = obs.bays.at(static_cast<std::size_t>(s.target_bay));
  const Eigen::Vector3d axis = axis_direction(bay.slot_pose);
  const auto [u1, u2] = lateral_basis(axis);
  Pose goal = bay.slot_pose;
  goal.roll = obs.arm_tip.roll;
  goal.set_position(
    bay.slot_pose.position() - params_.standoff_mm * axis +
    params_.landing_err_mm * (s.rng.normal() * u1 + s.rng.normal() * u2));
  goal.pitch = normalize_angle(goal.pitch + params_.landing_err_deg * s.rng.normal());
  goal.yaw = normalize_angle(goal.yaw + params_.landing_err_deg * s.rng.normal());

  int min_ticks = 0;
  if (macro) {
    // Stationary duration model, truncated at zero.
    double duration = -1.0;
    for (int attempt = 0; attempt < 64 && duration < 0.0; ++attempt) {
      duration = s.rng.normal(params_.macro_transit_mean_s, params_.macro_transit_std_s);
    }
    duration = std::max(duration, 0.0);
    s.macro_planned_s = duration;
    min_ticks = static_cast<int>(std::lround(duration / dt_s_));
  }
  plan_move(obs.arm_tip, goal, min_ticks);
  s.subgoal = Subgoal::Transit;
}

void OperatorPolicy::perceive(const StateUpdate & obs)
{
  auto & s = state_;
  const BaySnapshot & bay = obs.bays.at(static_cast<std::size_t>(s.target_bay));

  if (s.first_perceive) {
    s.first_perceive = false;
    if (s.rng.bernoulli(forced_feed_prob_at(params_, s.k))) {
      s.forced = true;
      s.subgoal = Subgoal::Feed;
      return;
    }
  }

  if (s.aligning_tilt) {
    const double sigma = noise_deg_at(params_, s.k);
    const double dp = normalize_angle(bay.slot_pose.pitch - obs.arm_tip.pitch) + sigma * s.rng.normal();
    const double dy = normalize_angle(bay.slot_pose.yaw - obs.arm_tip.yaw) + sigma * s.rng.normal();
    if (std::hypot(dp, dy) <= params_.accept_deg) {
      s.aligning_tilt = false;
      s.subgoal = Subgoal::Perceive;
      return;
    }
    Pose goal = obs.arm_tip;
    goal.pitch = normalize_angle(goal.pitch + dp);
    goal.yaw = normalize_angle(goal.yaw + dy);
    plan_move(obs.arm_tip, goal, 0);
    s.subgoal = Subgoal::Correct;
    return;
  }

  const Eigen::Vector3d axis = axis_direction(bay.slot_pose);
  const auto [u1, u2] = lateral_basis(axis);
  const double sigma = noise_mm_at(params_, s.k);
  const Eigen::Vector3d perceived = lateral_offset(obs.arm_tip, bay.slot_pose) +
                                    sigma * (s.rng.normal() * u1 + s.rng.normal() * u2);
  if (perceived.norm() <= params_.accept_mm) {
    s.subgoal = Subgoal::Feed;
    return;
  }
  Pose goal = obs.arm_tip;
  goal.set_position(obs.arm_tip.position() - perceived);
  plan_move(obs.arm_tip, goal, 0);
  s.subgoal = Subgoal::Correct;
}

bool OperatorPolicy::follow_plan(const StateUpdate & obs, PoseCommand & out)
{
  auto & s = state_;
  const Pose target = s.plan_elapsed < s.plan_ticks
                        ? lerp(s.from, s.goal, static_cast<double>(s.plan_elapsed + 1) / s.plan_ticks)
                        : s.goal;
  const Pose remaining = pose_delta(obs.arm_tip, s.goal);
  const bool at_goal = std::hypot(remaining.x, remaining.y, remaining.z) < kReachedMm &&
                       std::abs(remaining.pitch) < kReachedDeg &&
                       std::abs(remaining.yaw) < kReachedDeg &&
                       std::abs(remaining.roll) < kReachedDeg;
  if (s.plan_elapsed >= s.plan_ticks && at_goal) {
    return true;
  }
  ++s.plan_elapsed;
  out = make(pose_delta(obs.arm_tip, target), 0.0);
  if (!out.is_movement()) {
    // Holding still while the plan clock runs.
    out.delta = Pose{};
  }
  return false;
}

PoseCommand OperatorPolicy::next_command(const StateUpdate & obs)
{
  auto & s = state_;
  if (trial_over(obs)) {
    s.subgoal = Subgoal::Done;
    return make(Pose{}, 0.0);
  }
  if (obs.target_bay != s.target_bay) {
    start_leg(obs);
  }
  if (s.subgoal == Subgoal::Feed &&
      (obs.phase == Phase::Locked || obs.phase == Phase::ReleaseTriggered))
  {
    dwell(reaction_at(params_, s.k), Subgoal::Withdraw);
  }

  const double react = reaction_at(params_, s.k);
  for (int guard = 0; guard < 16; ++guard) {
    switch (s.subgoal) {
      case Subgoal::Start:
        start_leg(obs);
        continue;
      case Subgoal::Transit:
      case Subgoal::Correct: {
        PoseCommand cmd;
        if (!follow_plan(obs, cmd)) {
          if (s.subgoal == Subgoal::Transit && s.half == 0) {
            ++s.macro_ticks;
          }
          return cmd;
        }
        dwell(react, Subgoal::Perceive);
        continue;
      }
      case Subgoal::Dwell:
        if (s.dwell_left > 0) {
          --s.dwell_left;
          return make(Pose{}, 0.0);
        }
        s.subgoal = s.after_dwell;
        if (s.subgoal == Subgoal::Withdraw) {
          s.withdrawn_mm = 0.0;
        }
        continue;
      case Subgoal::Perceive:
        perceive(obs);
        continue;
      case Subgoal::Feed: {
        const BaySnapshot & bay = obs.bays.at(static_cast<std::size_t>(s.target_bay));
        const double depth = axial_depth(obs.arm_tip, bay.slot_pose);
        if (depth >= bay.seat_depth_mm - kReachedMm) {
          dwell(react, Subgoal::Withdraw);
          continue;
        }
        const double speed = s.forced ? params_.forced_feed_speed : params_.feed_speed;
        return make(Pose{}, std::min(speed, bay.seat_depth_mm - depth));
      }
      case Subgoal::Withdraw: {
        const bool fed = obs.phase != Phase::Aligning && obs.phase != Phase::Returning;
        if (!fed) {
          // The feed never registered with the repository: back off to the
          // standoff and align properly.
          const BaySnapshot & bay = obs.bays.at(static_cast<std::size_t>(s.target_bay));
          if (axial_depth(obs.arm_tip, bay.slot_pose) <= -params_.standoff_mm) {
            s.forced = false;
            s.aligning_tilt = true;
            s.subgoal = Subgoal::Perceive;
            continue;
          }
        } else if (s.withdrawn_mm > 120.0) {
          s.subgoal = Subgoal::Done;
          continue;
        }
        s.withdrawn_mm += params_.feed_speed;
        return make(Pose{}, -params_.feed_speed);
      }
      case Subgoal::Done:
        return make(Pose{}, 0.0);
    }
  }
  return make(Pose{}, 0.0);
}

}  // namespace ixsim
