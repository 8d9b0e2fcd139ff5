#include "ixsim/pose.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace ixsim
{

namespace
{
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}  // namespace

bool Pose::is_finite() const
{
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(pitch) &&
         std::isfinite(yaw) && std::isfinite(roll);
}

double normalize_angle(double deg)
{
  if (deg > -180.0 && deg <= 180.0) {
    return deg;
  }
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) {
    r += 360.0;
  } else if (r > 180.0) {
    r -= 360.0;
  }
  return r;
}

Pose normalized(Pose p)
{
  p.pitch = normalize_angle(p.pitch);
  p.yaw = normalize_angle(p.yaw);
  p.roll = normalize_angle(p.roll);
  return p;
}

Eigen::Vector3d axis_direction(const Pose & p)
{
  const double cp = std::cos(p.pitch * kDegToRad);
  const double sp = std::sin(p.pitch * kDegToRad);
  const double cy = std::cos(p.yaw * kDegToRad);
  const double sy = std::sin(p.yaw * kDegToRad);
  return {cp * cy, cp * sy, sp};
}

Eigen::Vector3d lateral_offset(const Pose & tip, const Pose & target)
{
  const Eigen::Vector3d d = axis_direction(target);
  const Eigen::Vector3d r = tip.position() - target.position();
  return r - r.dot(d) * d;
}

double axial_depth(const Pose & tip, const Pose & target)
{
  return (tip.position() - target.position()).dot(axis_direction(target));
}

AlignmentError alignment_error(const Pose & tip, const Pose & target)
{
  const Eigen::Vector3d a = axis_direction(tip);
  const Eigen::Vector3d d = axis_direction(target);
  // atan2 form stays accurate for small angles where acos(dot) loses digits.
  const double tilt = std::atan2(a.cross(d).norm(), a.dot(d)) * kRadToDeg;
  return {lateral_offset(tip, target).norm(), tilt};
}

}  // namespace ixsim
