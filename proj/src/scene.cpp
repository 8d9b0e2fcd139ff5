#include "ixsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ixsim
{

namespace
{

Eigen::Vector3d clamp_norm(const Eigen::Vector3d & v, double max_norm)
{
  const double n = v.norm();
  if (n > max_norm && n > 0.0) {
    return v * (max_norm / n);
  }
  return v;
}

Pose seated_pose(const Pose & slot, double depth)
{
  Pose p = slot;
  p.set_position(slot.position() + depth * axis_direction(slot));
  return p;
}

// Direction of the slippage drift: horizontal and perpendicular to the
// docking axis of bay 0.
Eigen::Vector3d slip_direction(const SceneState & scene)
{
  const Eigen::Vector3d axis = axis_direction(scene.bays[0].slot_pose);
  Eigen::Vector3d lateral = Eigen::Vector3d::UnitZ().cross(axis);
  if (lateral.norm() < 1e-9) {
    lateral = Eigen::Vector3d::UnitY();
  }
  return lateral.normalized();
}

}  // namespace

bool PoseCommand::is_finite() const
{
  return delta.is_finite() && std::isfinite(axial_feed) && std::isfinite(client_time_ms);
}

bool PoseCommand::is_movement() const
{
  return delta.x != 0.0 || delta.y != 0.0 || delta.z != 0.0 || delta.pitch != 0.0 ||
         delta.yaw != 0.0 || delta.roll != 0.0 || axial_feed != 0.0;
}

const Instrument * SceneState::carried() const
{
  for (const auto & inst : instruments) {
    if (inst.location == InstrumentLocation::Carried) {
      return &inst;
    }
  }
  return nullptr;
}

Instrument * SceneState::find_instrument(int id)
{
  for (auto & inst : instruments) {
    if (inst.id == id) {
      return &inst;
    }
  }
  return nullptr;
}

const Instrument * SceneState::find_instrument(int id) const
{
  return const_cast<SceneState *>(this)->find_instrument(id);
}

SceneState new_scene(const SceneConfig & config)
{
  if (!(config.dt_s > 0.0) || !std::isfinite(config.dt_s)) {
    throw ConfigError("scene: dt must be positive");
  }
  const auto & lim = config.limits;
  if (!(lim.max_step_mm > 0.0) || !(lim.max_step_deg > 0.0) || !(lim.seat_depth_mm > 0.0) ||
      lim.slip_bias_mm < 0.0 || !(lim.capture_mm > 0.0))
  {
    throw ConfigError("scene: motion limits must be positive (slip bias non-negative)");
  }
  if (!config.home.is_finite() || !config.bay_poses[0].is_finite() ||
      !config.bay_poses[1].is_finite())
  {
    throw ConfigError("scene: poses must be finite");
  }
  if ((config.bay_poses[0].position() - config.bay_poses[1].position()).norm() < 1e-9) {
    throw ConfigError("scene: the two bay poses coincide");
  }
  if (config.instruments.size() > 2) {
    throw ConfigError(
      "scene: at most 2 instruments are supported, got " +
      std::to_string(config.instruments.size()));
  }

  SceneState scene;
  scene.arm_tip = normalized(config.home);
  scene.dt_s = config.dt_s;
  scene.limits = lim;
  for (int b = 0; b < 2; ++b) {
    scene.bays[b].id = b;
    scene.bays[b].slot_pose = normalized(config.bay_poses[b]);
  }

  std::set<int> ids;
  int n_carried = 0;
  for (const auto & placement : config.instruments) {
    if (!ids.insert(placement.id).second) {
      throw ConfigError("scene: duplicate instrument id " + std::to_string(placement.id));
    }
    Instrument inst;
    inst.id = placement.id;
    if (placement.bay == -1) {
      if (++n_carried > 1) {
        throw ConfigError("scene: only one instrument can be carried");
      }
      inst.location = InstrumentLocation::Carried;
      inst.base_pose = scene.arm_tip;
    } else if (placement.bay == 0 || placement.bay == 1) {
      auto & bay = scene.bays[placement.bay];
      if (bay.occupied_by) {
        throw ConfigError("scene: bay " + std::to_string(placement.bay) + " assigned twice");
      }
      bay.occupied_by = inst.id;
      bay.limit_switch_pressed = true;
      inst.location = InstrumentLocation::Stowed;
      inst.bay = placement.bay;
      inst.base_pose = seated_pose(bay.slot_pose, lim.seat_depth_mm);
    } else {
      throw ConfigError("scene: instrument bay must be -1 (carried), 0 or 1");
    }
    scene.instruments.push_back(inst);
  }
  return scene;
}

int nearest_bay(const SceneState & scene, const Pose & tip)
{
  const double d0 = (tip.position() - scene.bays[0].slot_pose.position()).squaredNorm();
  const double d1 = (tip.position() - scene.bays[1].slot_pose.position()).squaredNorm();
  return d1 < d0 ? 1 : 0;
}

SceneState apply_command(const SceneState & scene, const PoseCommand & cmd)
{
  if (!cmd.is_finite()) {
    throw std::invalid_argument("apply_command: non-finite command field");
  }
  SceneState next = scene;
  const auto & lim = scene.limits;

  const Pose & feed_axis = scene.bays[nearest_bay(scene, scene.arm_tip)].slot_pose;
  Eigen::Vector3d translation = Eigen::Vector3d(cmd.delta.x, cmd.delta.y, cmd.delta.z) +
                                cmd.axial_feed * axis_direction(feed_axis);
  translation = clamp_norm(translation, lim.max_step_mm);
  if (!scene.base_stable) {
    // Slippage biases the commanded motion; the clamp still bounds the result.
    translation = clamp_norm(translation + lim.slip_bias_mm * slip_direction(scene),
                             lim.max_step_mm);
  }
  const Eigen::Vector3d rotation = clamp_norm(
    Eigen::Vector3d(cmd.delta.pitch, cmd.delta.yaw, cmd.delta.roll), lim.max_step_deg);

  Pose tip = scene.arm_tip;
  tip.set_position(tip.position() + translation);
  tip.pitch += rotation.x();
  tip.yaw += rotation.y();
  tip.roll += rotation.z();
  tip = normalized(tip);

  // The slot floor stops the tip at seat depth. A tip that was already deeper
  // is never pushed back further than where it started this tick.
  for (const auto & bay : scene.bays) {
    const double depth = axial_depth(tip, bay.slot_pose);
    const double floor_depth =
      std::max(lim.seat_depth_mm, axial_depth(scene.arm_tip, bay.slot_pose));
    if (depth > floor_depth && lateral_offset(tip, bay.slot_pose).norm() < lim.capture_mm) {
      tip.set_position(tip.position() - (depth - floor_depth) * axis_direction(bay.slot_pose));
    }
  }

  next.arm_tip = tip;
  for (auto & inst : next.instruments) {
    if (inst.location == InstrumentLocation::Carried) {
      inst.base_pose = tip;
    }
  }
  next.tick = scene.tick + 1;
  return next;
}

const char * to_string(InstrumentLocation loc)
{
  switch (loc) {
    case InstrumentLocation::Stowed:
      return "stowed";
    case InstrumentLocation::Carried:
      return "carried";
    case InstrumentLocation::Ejected:
      return "ejected";
  }
  return "unknown";
}

InstrumentLocation instrument_location_from_string(const std::string & s)
{
  if (s == "stowed") {
    return InstrumentLocation::Stowed;
  }
  if (s == "carried") {
    return InstrumentLocation::Carried;
  }
  if (s == "ejected") {
    return InstrumentLocation::Ejected;
  }
  throw std::invalid_argument("unknown instrument location '" + s + "'");
}

}  // namespace ixsim
