#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ixsim/pose.hpp"

namespace ixsim
{

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Master-side motion request for one control tick.
struct PoseCommand
{
  std::uint64_t seq = 0;
  double client_time_ms = 0.0;
  Pose delta;                ///< translation (mm) and rotation (deg) increments
  double axial_feed = 0.0;   ///< signed mm along the current bay axis
  std::string session_id;

  bool is_finite() const;
  /// True when any motion field is nonzero.
  bool is_movement() const;

  friend bool operator==(const PoseCommand &, const PoseCommand &) = default;
};

enum class InstrumentLocation { Stowed, Carried, Ejected };

struct Instrument
{
  int id = 0;
  Pose base_pose;
  InstrumentLocation location = InstrumentLocation::Stowed;
  int bay = -1;  ///< valid only while stowed

  friend bool operator==(const Instrument &, const Instrument &) = default;
};

struct DockingBay
{
  int id = 0;
  Pose slot_pose;  ///< bay mouth; the long axis points into the slot
  std::optional<int> occupied_by;
  bool limit_switch_pressed = false;

  friend bool operator==(const DockingBay &, const DockingBay &) = default;
};

/// Per-tick motion limits and the slippage model.
struct MotionLimits
{
  double max_step_mm = 5.0;
  double max_step_deg = 2.0;
  double slip_bias_mm = 1.0;     ///< lateral drift per tick once the base has slipped
  double seat_depth_mm = 25.0;   ///< depth of a fully seated passive component
  double capture_mm = 30.0;      ///< lateral radius within which the slot floor stops the tip

  friend bool operator==(const MotionLimits &, const MotionLimits &) = default;
};

struct InstrumentPlacement
{
  int id = 0;
  /// -1 means carried by the arm, otherwise the bay index.
  int bay = -1;
};

struct SceneConfig
{
  Pose home{-400.0, 0.0, 0.0, -15.0, 10.0, 0.0};
  std::array<Pose, 2> bay_poses{Pose{0.0, -60.0, 0.0, 0.0, 0.0, 0.0},
                                Pose{0.0, 60.0, 0.0, 0.0, 0.0, 0.0}};
  std::vector<InstrumentPlacement> instruments{{0, 0}, {1, 1}};
  MotionLimits limits;
  double dt_s = 0.01;
};

struct SceneState
{
  Pose arm_tip;
  std::array<DockingBay, 2> bays;
  std::vector<Instrument> instruments;
  bool base_stable = true;
  std::int64_t tick = 0;
  double dt_s = 0.01;
  MotionLimits limits;

  double sim_time() const { return static_cast<double>(tick) * dt_s; }
  /// Instrument currently held by the arm, if any.
  const Instrument * carried() const;
  Instrument * find_instrument(int id);
  const Instrument * find_instrument(int id) const;

  friend bool operator==(const SceneState &, const SceneState &) = default;
};

/// Builds the initial scene. Throws ConfigError on invalid configurations.
SceneState new_scene(const SceneConfig & config);

/// Applies one velocity-clamped command and advances the clock by one tick.
/// Throws std::invalid_argument on non-finite commands.
SceneState apply_command(const SceneState & scene, const PoseCommand & cmd);

/// Index of the bay whose mouth is closest to `tip`.
int nearest_bay(const SceneState & scene, const Pose & tip);

const char * to_string(InstrumentLocation loc);
InstrumentLocation instrument_location_from_string(const std::string & s);

}  // namespace ixsim
