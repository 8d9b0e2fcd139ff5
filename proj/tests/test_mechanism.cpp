#include <gtest/gtest.h>

#include "ixsim/mechanism.hpp"
#include "ixsim/rng.hpp"

using namespace ixsim;

namespace
{

LatchParams latch(double preload, double c_fric, double normal, double release = 0.0)
{
  LatchParams p;
  p.f_lock_preload = preload;
  p.c_fric = c_fric;
  p.f_normal = normal;
  p.f_release = release;
  return p;
}

InterfaceParams iface(double residual, double mu, double n)
{
  InterfaceParams i;
  i.f_residual = residual;
  i.mu_interface = mu;
  i.n_interface = n;
  return i;
}

}  // namespace

TEST(ReleaseThreshold, HandComputedValues)
{
  EXPECT_DOUBLE_EQ(release_threshold(latch(0, 0, 10)), 0.0);
  EXPECT_DOUBLE_EQ(release_threshold(latch(10, 0.2, 5)), 11.0);
  EXPECT_DOUBLE_EQ(release_threshold(latch(8, 0.5, 4)), 10.0);
}

TEST(CanRelease, InclusiveAtThreshold)
{
  EXPECT_TRUE(can_release(latch(10, 0.2, 5, 11.0)));
  EXPECT_TRUE(can_release(latch(0, 0, 0, 0.0)));
  EXPECT_FALSE(can_release(latch(10, 0.2, 5, 10.9)));
}

TEST(CanRelease, DefaultActuatorOpensDefaultLatch)
{
  EXPECT_TRUE(can_release(LatchParams{}));
}

TEST(CanRelease, MonotoneInResistingTerms)
{
  Rng r(2);
  for (int i = 0; i < 20000; ++i) {
    const LatchParams p = latch(r.uniform(0, 20), r.uniform(0, 1.9), r.uniform(0, 20), r.uniform(0, 40));
    const bool base = can_release(p);
    LatchParams q = p;
    switch (i % 3) {
      case 0:
        q.f_lock_preload += r.uniform(0, 5);
        break;
      case 1:
        q.c_fric = std::min(1.99, q.c_fric + r.uniform(0, 0.5));
        break;
      default:
        q.f_normal += r.uniform(0, 5);
    }
    ASSERT_FALSE(!base && can_release(q));
  }
}

TEST(WithdrawResistance, HandComputedValues)
{
  const LatchParams no_preload = latch(0, 0, 0);
  EXPECT_DOUBLE_EQ(withdraw_resistance(iface(0, 0, 20), true, no_preload), 0.0);
  EXPECT_DOUBLE_EQ(withdraw_resistance(iface(2, 0.1, 30), true, latch(10, 0.2, 5)), 5.0);
  EXPECT_DOUBLE_EQ(withdraw_resistance(iface(2, 0.1, 30), false, latch(10, 0.2, 5)), 15.0);
}

TEST(WithdrawResistance, DropsWhenUnlocked)
{
  Rng r(3);
  for (int i = 0; i < 5000; ++i) {
    const InterfaceParams in = iface(r.uniform(0, 10), r.uniform(0, 1.9), r.uniform(0, 50));
    const LatchParams p = latch(r.uniform(0, 20), 0.2, 5);
    const double unlocked = withdraw_resistance(in, true, p);
    const double locked = withdraw_resistance(in, false, p);
    ASSERT_LE(unlocked, locked);
    if (p.f_lock_preload > 0) {
      ASSERT_LT(unlocked, locked);
    }
  }
}

TEST(ParamsValid, RejectsOutOfRange)
{
  EXPECT_TRUE(LatchParams{}.valid());
  EXPECT_FALSE(latch(-1, 0.2, 5).valid());
  EXPECT_FALSE(latch(10, 2.0, 5).valid());
  EXPECT_FALSE(iface(0, 2.5, 1).valid());
  ToleranceEnvelope env;
  EXPECT_TRUE(env.valid());
  env.collision_trans_threshold = 2.0;
  EXPECT_FALSE(env.valid());
  ToleranceEnvelope env2;
  env2.eject_trans_threshold = 8.0;
  EXPECT_FALSE(env2.valid());
}

TEST(TryEngageLatch, Examples)
{
  const ToleranceEnvelope env;
  EXPECT_EQ(try_engage_latch({0, 0}, env), EngageOutcome::Engaged);
  EXPECT_EQ(try_engage_latch({10, 0}, env), EngageOutcome::Collision);
  EXPECT_EQ(try_engage_latch({4, 0}, env), EngageOutcome::NoEngage);
  EXPECT_EQ(try_engage_latch({3, 5}, env), EngageOutcome::Engaged);
  EXPECT_EQ(try_engage_latch({1, 6}, env), EngageOutcome::NoEngage);
  EXPECT_EQ(try_engage_latch({8, 0}, env), EngageOutcome::NoEngage);
}

TEST(TryEngageLatch, RegionsPartitionErrorSpace)
{
  const ToleranceEnvelope env;
  Rng r(4);
  for (int i = 0; i < 20000; ++i) {
    const AlignmentError e{r.uniform(0, 20), r.uniform(0, 20)};
    const EngageOutcome o = try_engage_latch(e, env);
    const bool engaged = e.trans_mm <= env.engage_trans_tol && e.tilt_deg <= env.engage_tilt_tol;
    const bool collision = e.trans_mm > env.collision_trans_threshold;
    ASSERT_EQ(o == EngageOutcome::Engaged, engaged);
    ASSERT_EQ(o == EngageOutcome::Collision, collision);
    ASSERT_EQ(o == EngageOutcome::NoEngage, !engaged && !collision);
  }
}

TEST(TryTriggerLimitSwitch, Examples)
{
  const ToleranceEnvelope env;
  EXPECT_TRUE(try_trigger_limit_switch({0, 0}, true, env));
  EXPECT_FALSE(try_trigger_limit_switch({0, 9}, true, env));
  EXPECT_FALSE(try_trigger_limit_switch({0, 0}, false, env));
}

TEST(TryTriggerLimitSwitch, NeverWithoutDepth)
{
  const ToleranceEnvelope env;
  Rng r(5);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_FALSE(try_trigger_limit_switch({r.uniform(0, 20), r.uniform(0, 20)}, false, env));
  }
}

TEST(CollisionOutcome, Examples)
{
  const ToleranceEnvelope env;
  BayContext empty{1, std::nullopt};
  const auto none = collision_outcome({9, 0}, 2.0, empty, env, 10.0);
  EXPECT_DOUBLE_EQ(none.reaction_force, 20.0);
  EXPECT_FALSE(none.base_slippage);
  EXPECT_FALSE(none.adjacent_ejection);

  const auto slip = collision_outcome({9, 0}, 5.0, empty, env, 10.0);
  EXPECT_DOUBLE_EQ(slip.reaction_force, 50.0);
  EXPECT_TRUE(slip.base_slippage);

  BayContext occupied{1, 7};
  const auto eject = collision_outcome({15, 0}, 1.0, occupied, env, 10.0);
  EXPECT_TRUE(eject.adjacent_ejection);
  ASSERT_TRUE(eject.ejected_instrument.has_value());
  EXPECT_EQ(*eject.ejected_instrument, 7);
  EXPECT_FALSE(collision_outcome({15, 0}, 1.0, empty, env, 10.0).adjacent_ejection);
  EXPECT_FALSE(collision_outcome({11, 0}, 1.0, occupied, env, 10.0).adjacent_ejection);
}

TEST(CollisionOutcome, SlipThresholdIsStrict)
{
  const ToleranceEnvelope env;
  EXPECT_FALSE(collision_outcome({9, 0}, 4.0, {}, env, 10.0).base_slippage);
}
