#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ixsim/rng.hpp"

using ixsim::Rng;

TEST(Rng, SameSeedSameSequence)
{
  Rng a(7);
  Rng b(7);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
    ASSERT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, Mt19937_64ReferenceOutput)
{
  // The 10000th output of the default-seeded engine is fixed by the standard.
  Rng r(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) {
    v = r.next_u64();
  }
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, UniformStaysInUnitInterval)
{
  Rng r(1);
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(Rng, NormalMomentsAreStandard)
{
  Rng r(3);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Rng, BernoulliEdges)
{
  Rng r(9);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_FALSE(r.bernoulli(0.0));
    ASSERT_TRUE(r.bernoulli(1.0));
  }
}

TEST(Rng, Splitmix64KnownValues)
{
  // Reference outputs of the SplitMix64 generator started from state 0.
  EXPECT_EQ(ixsim::splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_NE(ixsim::splitmix64(1), ixsim::splitmix64(2));
}
