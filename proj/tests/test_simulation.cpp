#include <gtest/gtest.h>

#include "ixsim/simulation.hpp"
#include "test_support.hpp"

using namespace ixsim;
using ixsim::testing::command;

TEST(Simulation, InitialSnapshot)
{
  SimConfig cfg;
  cfg.scene = scene_for_task(cfg.scene, TaskKind::Attach);
  const Simulation sim(cfg, TaskKind::Attach);
  const StateUpdate u = sim.snapshot();
  EXPECT_EQ(u.seq, 0u);
  EXPECT_EQ(u.tick, 0);
  EXPECT_EQ(u.phase, Phase::AttachIdle);
  ASSERT_EQ(u.bays.size(), 2u);
  ASSERT_EQ(u.instruments.size(), 2u);
  EXPECT_DOUBLE_EQ(u.bays[0].seat_depth_mm, 25.0);
  ASSERT_EQ(sim.events().size(), 1u);
  EXPECT_EQ(sim.events()[0].name, "AttachIdle");
}

TEST(Simulation, StepEchoesSeqAndAdvancesTime)
{
  SimConfig cfg;
  cfg.scene = scene_for_task(cfg.scene, TaskKind::Attach);
  Simulation sim(cfg, TaskKind::Attach);
  const StateUpdate u = sim.step(command(1));
  EXPECT_EQ(u.seq, 1u);
  EXPECT_EQ(u.phase, Phase::AttachIdle);
  EXPECT_DOUBLE_EQ(u.sim_time, 0.01);
  EXPECT_TRUE(u.events_since_last.empty());
  Pose d;
  d.x = 1.0;
  const StateUpdate v = sim.step(command(2, d));
  EXPECT_EQ(v.phase, Phase::Aligning);
  EXPECT_EQ(v.events_since_last.size(), 2u);
  EXPECT_GE(v.sim_time, u.sim_time);
}

TEST(Simulation, SceneForTaskLayouts)
{
  const SceneConfig a = scene_for_task({}, TaskKind::Attach);
  EXPECT_EQ(a.instruments.size(), 2u);
  EXPECT_EQ(a.instruments[0].bay, 0);
  const SceneConfig c = scene_for_task({}, TaskKind::FullCycle);
  EXPECT_EQ(c.instruments[0].bay, -1);
  EXPECT_EQ(c.instruments[1].bay, 1);
}

TEST(Simulation, InvalidMechanismRejected)
{
  SimConfig cfg;
  cfg.fsm.mechanism.envelope.engage_trans_tol = 0.0;
  EXPECT_THROW(Simulation(cfg, TaskKind::Attach), ConfigError);
}
