#pragma once

#include <optional>

#include "ixsim/pose.hpp"

namespace ixsim
{

/// Release-side force model of the latch. Forces in newtons.
struct LatchParams
{
  double f_lock_preload = 10.0;  ///< spring preload holding the latch closed
  double c_fric = 0.2;           ///< friction coefficient while unlocking
  double f_normal = 5.0;         ///< normal force at the latch contact surface
  double f_release = 15.0;       ///< force the repository release actuator can apply

  bool valid() const;
};

/// Separation-side force model of the active/passive interface.
struct InterfaceParams
{
  double f_residual = 2.0;
  double mu_interface = 0.1;
  double n_interface = 30.0;

  bool valid() const;
};

/// Geometric gates for engagement, switch triggering and collision effects.
struct ToleranceEnvelope
{
  double engage_trans_tol = 3.0;            // mm
  double engage_tilt_tol = 5.0;             // deg
  double trigger_tilt_tol = 5.0;            // deg
  double collision_trans_threshold = 8.0;   // mm
  double eject_trans_threshold = 12.0;      // mm
  double slip_force_threshold = 40.0;       // N

  /// 0 < engage < collision < eject, all other fields non-negative.
  bool valid() const;
};

struct MechanismConfig
{
  LatchParams latch;
  InterfaceParams interface;
  ToleranceEnvelope envelope;
  double k_contact = 10.0;  ///< N per (mm/tick) of feed speed at a rigid collision

  bool valid() const;
};

/// Minimum actuator force that opens the latch.
double release_threshold(const LatchParams & p);

/// Whether the repository release actuator can open the latch.
bool can_release(const LatchParams & p);

/// Axial force resisting separation of the active and passive components.
/// When still locked the latch preload adds to the interface friction.
double withdraw_resistance(const InterfaceParams & i, bool unlocked, const LatchParams & p);

enum class EngageOutcome { Engaged, NoEngage, Collision };

/// Outcome when the active component reaches the passive face of a stored
/// instrument. Regions: Engaged inside both tolerances, Collision beyond the
/// collision threshold, NoEngage in between.
EngageOutcome try_engage_latch(const AlignmentError & err, const ToleranceEnvelope & env);

/// Whether an inserted instrument presses the bay's limit switch.
bool try_trigger_limit_switch(
  const AlignmentError & err, bool depth_reached, const ToleranceEnvelope & env);

/// Occupancy of the neighbouring bay at collision time.
struct BayContext
{
  std::optional<int> adjacent_bay;
  std::optional<int> adjacent_instrument;  ///< set when the adjacent bay is occupied
};

struct CollisionEffects
{
  double reaction_force = 0.0;  // N
  bool base_slippage = false;
  bool adjacent_ejection = false;
  std::optional<int> ejected_instrument;
};

/// Consequences of a rigid collision. Deterministic: the thresholds alone
/// decide which effects occur.
CollisionEffects collision_outcome(
  const AlignmentError & err, double feed_speed_mm_per_tick, const BayContext & bays,
  const ToleranceEnvelope & env, double k_contact);

const char * to_string(EngageOutcome o);

}  // namespace ixsim
