#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ixsim
{

/// End-effector or instrument pose in the repository frame.
/// Positions in millimeters, angles in degrees. Roll spins about the
/// instrument's long axis and therefore never contributes to tilt.
struct Pose
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  double roll = 0.0;

  Eigen::Vector3d position() const { return {x, y, z}; }
  void set_position(const Eigen::Vector3d & p)
  {
    x = p.x();
    y = p.y();
    z = p.z();
  }

  bool is_finite() const;

  friend bool operator==(const Pose &, const Pose &) = default;
};

/// Wraps an angle in degrees into (-180, 180].
double normalize_angle(double deg);

/// Pose with all three angles wrapped into (-180, 180].
Pose normalized(Pose p);

/// Unit direction of the pose's long axis. Pitch tips the axis up out of the
/// horizontal plane, yaw turns it about +z; (0, 0) points along +x.
Eigen::Vector3d axis_direction(const Pose & p);

struct AlignmentError
{
  double trans_mm = 0.0;  ///< lateral offset perpendicular to the target axis
  double tilt_deg = 0.0;  ///< angle between the two long axes

  friend bool operator==(const AlignmentError &, const AlignmentError &) = default;
};

/// Misalignment of `tip` relative to the docking axis defined by `target`.
AlignmentError alignment_error(const Pose & tip, const Pose & target);

/// Signed position of `tip` along the target axis, measured from the target
/// origin. Positive values are inside the slot.
double axial_depth(const Pose & tip, const Pose & target);

/// Lateral offset vector of `tip` from the target axis (perpendicular component).
Eigen::Vector3d lateral_offset(const Pose & tip, const Pose & target);

}  // namespace ixsim
