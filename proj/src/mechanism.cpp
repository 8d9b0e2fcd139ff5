#include "ixsim/mechanism.hpp"

#include <cmath>

namespace ixsim
{

namespace
{
bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
}  // namespace

bool LatchParams::valid() const
{
  return nonneg(f_lock_preload) && nonneg(c_fric) && c_fric < 2.0 && nonneg(f_normal) &&
         nonneg(f_release);
}

bool InterfaceParams::valid() const
{
  return nonneg(f_residual) && nonneg(mu_interface) && mu_interface < 2.0 &&
         nonneg(n_interface);
}

bool ToleranceEnvelope::valid() const
{
  return nonneg(engage_trans_tol) && engage_trans_tol > 0.0 &&
         engage_trans_tol < collision_trans_threshold &&
         collision_trans_threshold < eject_trans_threshold && std::isfinite(eject_trans_threshold) &&
         nonneg(engage_tilt_tol) && nonneg(trigger_tilt_tol) && nonneg(slip_force_threshold);
}

bool MechanismConfig::valid() const
{
  return latch.valid() && interface.valid() && envelope.valid() && nonneg(k_contact);
}

double release_threshold(const LatchParams & p)
{
  return p.f_lock_preload + p.c_fric * p.f_normal;
}

bool can_release(const LatchParams & p)
{
  return p.f_release >= release_threshold(p);
}

double withdraw_resistance(const InterfaceParams & i, bool unlocked, const LatchParams & p)
{
  const double sliding = i.f_residual + i.mu_interface * i.n_interface;
  return unlocked ? sliding : sliding + p.f_lock_preload;
}

EngageOutcome try_engage_latch(const AlignmentError & err, const ToleranceEnvelope & env)
{
  if (err.trans_mm > env.collision_trans_threshold) {
    return EngageOutcome::Collision;
  }
  if (err.trans_mm <= env.engage_trans_tol && err.tilt_deg <= env.engage_tilt_tol) {
    return EngageOutcome::Engaged;
  }
  return EngageOutcome::NoEngage;
}

bool try_trigger_limit_switch(
  const AlignmentError & err, bool depth_reached, const ToleranceEnvelope & env)
{
  return depth_reached && err.tilt_deg <= env.trigger_tilt_tol &&
         err.trans_mm <= env.engage_trans_tol;
}

CollisionEffects collision_outcome(
  const AlignmentError & err, double feed_speed_mm_per_tick, const BayContext & bays,
  const ToleranceEnvelope & env, double k_contact)
{
  CollisionEffects fx;
  fx.reaction_force = k_contact * std::abs(feed_speed_mm_per_tick);
  fx.base_slippage = fx.reaction_force > env.slip_force_threshold;
  if (err.trans_mm > env.eject_trans_threshold && bays.adjacent_instrument) {
    fx.adjacent_ejection = true;
    fx.ejected_instrument = bays.adjacent_instrument;
  }
  return fx;
}

const char * to_string(EngageOutcome o)
{
  switch (o) {
    case EngageOutcome::Engaged:
      return "Engaged";
    case EngageOutcome::NoEngage:
      return "NoEngage";
    case EngageOutcome::Collision:
      return "Collision";
  }
  return "unknown";
}

}  // namespace ixsim
