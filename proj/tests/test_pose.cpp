#include <gtest/gtest.h>

#include <cmath>

#include "ixsim/pose.hpp"
#include "ixsim/rng.hpp"

using namespace ixsim;

TEST(Pose, NormalizeAngleRange)
{
  EXPECT_DOUBLE_EQ(normalize_angle(180.0), 180.0);
  EXPECT_DOUBLE_EQ(normalize_angle(-180.0), 180.0);
  EXPECT_DOUBLE_EQ(normalize_angle(190.0), -170.0);
  EXPECT_DOUBLE_EQ(normalize_angle(-190.0), 170.0);
  EXPECT_DOUBLE_EQ(normalize_angle(720.0), 0.0);
  EXPECT_DOUBLE_EQ(normalize_angle(45.0), 45.0);
}

TEST(Pose, NormalizeAngleProperty)
{
  Rng r(11);
  for (int i = 0; i < 10000; ++i) {
    const double a = r.uniform(-2000.0, 2000.0);
    const double n = normalize_angle(a);
    ASSERT_GT(n, -180.0);
    ASSERT_LE(n, 180.0);
    const double turns = (a - n) / 360.0;
    ASSERT_NEAR(turns, std::round(turns), 1e-9);
  }
}

TEST(Pose, AxisDirection)
{
  const Eigen::Vector3d x = axis_direction(Pose{});
  EXPECT_NEAR(x.x(), 1.0, 1e-12);
  EXPECT_NEAR(x.y(), 0.0, 1e-12);
  Pose yawed;
  yawed.yaw = 90.0;
  EXPECT_NEAR(axis_direction(yawed).y(), 1.0, 1e-12);
  Pose pitched;
  pitched.pitch = 90.0;
  EXPECT_NEAR(axis_direction(pitched).z(), 1.0, 1e-12);
}

TEST(AlignmentError, IdenticalPosesGiveZero)
{
  const Pose p{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const AlignmentError e = alignment_error(p, p);
  EXPECT_NEAR(e.trans_mm, 0.0, 1e-12);
  EXPECT_NEAR(e.tilt_deg, 0.0, 1e-6);
}

TEST(AlignmentError, LateralOffsetOnly)
{
  const Pose target{};
  Pose tip;
  tip.y = 3.0;
  const AlignmentError e = alignment_error(tip, target);
  EXPECT_NEAR(e.trans_mm, 3.0, 1e-12);
  EXPECT_NEAR(e.tilt_deg, 0.0, 1e-12);
}

TEST(AlignmentError, PitchOnly)
{
  const Pose target{};
  Pose tip;
  tip.pitch = 7.0;
  const AlignmentError e = alignment_error(tip, target);
  EXPECT_NEAR(e.trans_mm, 0.0, 1e-12);
  EXPECT_NEAR(e.tilt_deg, 7.0, 1e-9);
}

TEST(AlignmentError, RollNeverTilts)
{
  const Pose target{};
  Pose tip;
  tip.roll = 40.0;
  EXPECT_NEAR(alignment_error(tip, target).tilt_deg, 0.0, 1e-9);
}

TEST(AlignmentError, AxialOffsetIsNotLateral)
{
  Pose tip;
  tip.x = 25.0;
  EXPECT_NEAR(alignment_error(tip, Pose{}).trans_mm, 0.0, 1e-12);
  EXPECT_NEAR(axial_depth(tip, Pose{}), 25.0, 1e-12);
}

TEST(AlignmentError, CombinedPitchYawMatchesSphericalAngle)
{
  // Independent oracle: angle between axes from the spherical law of cosines.
  Rng r(5);
  for (int i = 0; i < 2000; ++i) {
    Pose target;
    target.pitch = r.uniform(-60.0, 60.0);
    target.yaw = r.uniform(-170.0, 170.0);
    Pose tip = target;
    tip.pitch = r.uniform(-60.0, 60.0);
    tip.yaw = r.uniform(-170.0, 170.0);
    const double d2r = M_PI / 180.0;
    const double c = std::sin(tip.pitch * d2r) * std::sin(target.pitch * d2r) +
                     std::cos(tip.pitch * d2r) * std::cos(target.pitch * d2r) *
                       std::cos((tip.yaw - target.yaw) * d2r);
    const double expected = std::acos(std::clamp(c, -1.0, 1.0)) / d2r;
    ASSERT_NEAR(alignment_error(tip, target).tilt_deg, expected, 1e-6);
  }
}

TEST(AlignmentError, SymmetricInLateralSign)
{
  Rng r(8);
  for (int i = 0; i < 1000; ++i) {
    Pose target;
    target.yaw = r.uniform(-180.0, 180.0);
    const double off = r.uniform(0.0, 20.0);
    const double depth = r.uniform(-30.0, 30.0);
    const Eigen::Vector3d axis = axis_direction(target);
    const Eigen::Vector3d side = Eigen::Vector3d::UnitZ().cross(axis).normalized();
    Pose a = target;
    Pose b = target;
    a.set_position(depth * axis + off * side);
    b.set_position(depth * axis - off * side);
    ASSERT_NEAR(alignment_error(a, target).trans_mm, alignment_error(b, target).trans_mm, 1e-9);
    ASSERT_NEAR(alignment_error(a, target).trans_mm, off, 1e-9);
  }
}

TEST(AlignmentError, ZeroOnlyWhenCoaxial)
{
  Rng r(12);
  for (int i = 0; i < 1000; ++i) {
    Pose tip{r.uniform(-5, 5), r.uniform(-5, 5), r.uniform(-5, 5), r.uniform(-10, 10),
             r.uniform(-10, 10), 0.0};
    const AlignmentError e = alignment_error(tip, Pose{});
    const bool coaxial = std::hypot(tip.y, tip.z) < 1e-12 && std::abs(tip.pitch) < 1e-12 &&
                         std::abs(tip.yaw) < 1e-12;
    ASSERT_EQ(e.trans_mm == 0.0 && e.tilt_deg == 0.0, coaxial);
  }
}
