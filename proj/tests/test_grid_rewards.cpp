#include <gtest/gtest.h>

#include <cmath>

#include "osa/belief_grid.hpp"
#include "osa/error.hpp"
#include "osa/rewards.hpp"

using namespace osa;

TEST(Rewards, DelayPenaltyIsNaturalLog) {
  RewardParams r;
  EXPECT_EQ(r.delay_penalty(1), 0.0);
  EXPECT_NEAR(r.delay_penalty(2), 10.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(r.delay_penalty(2), 6.931, 1e-3);
  for (int l = 1; l < 100; ++l) {
    EXPECT_LE(r.delay_penalty(l), r.delay_penalty(l + 1));
  }
}

TEST(Rewards, Validation) {
  RewardParams r;
  EXPECT_NO_THROW(r.validate());
  r.p_3g = r.p_p;
  EXPECT_THROW(r.validate(), Error);
  r = {};
  r.c_s = -1;
  EXPECT_THROW(r.validate(), Error);
  r = {};
  r.gamma = -0.5;
  EXPECT_THROW(r.validate(), Error);
  r = {};
  r.c_s = 300; // 350 - 300 - 100 < 0
  EXPECT_FALSE(r.idle_reward_nonnegative());
  EXPECT_NO_THROW(r.validate());
  r = {};
  r.phi = INFINITY;
  EXPECT_THROW(r.validate(), Error);
}

TEST(BeliefGrid, ForChannelContainsSpecialPointsExactly) {
  const ChannelParams p{0.15, 0.1};
  const auto g = BeliefGrid::for_channel(p);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[g.size() - 1], 1.0);
  EXPECT_NO_THROW(g.index_of(0.15));
  EXPECT_NO_THROW(g.index_of(0.1));
  EXPECT_NO_THROW(g.index_of(stationary_idle(p)));
  EXPECT_EQ(g[g.index_of(stationary_idle(p))], stationary_idle(p));
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_LT(g[i - 1], g[i]);
  }
  // 0.15 and 0.1 coincide with uniform points; pi0 is new.
  EXPECT_EQ(g.size(), 1002u);
  EXPECT_NEAR(g.resolution(), 1e-3, 1e-12);
}

TEST(BeliefGrid, RejectsBadPoints) {
  EXPECT_THROW(BeliefGrid({0.0, 0.5, 0.5, 1.0}), Error);
  EXPECT_THROW(BeliefGrid({0.1, 1.0}), Error);
  EXPECT_THROW(BeliefGrid({0.0, 0.9}), Error);
  EXPECT_THROW(BeliefGrid::uniform(0), Error);
}

TEST(BeliefGrid, LocateAndNearest) {
  const auto g = BeliefGrid::uniform(4); // 0, .25, .5, .75, 1
  auto b = g.locate(0.375);
  EXPECT_EQ(b.lo, 1u);
  EXPECT_NEAR(b.weight, 0.5, 1e-12);
  b = g.locate(1.0);
  EXPECT_EQ(g[b.lo] + b.weight * (g[b.lo + 1] - g[b.lo]), 1.0);
  EXPECT_EQ(g.nearest(0.6), 2u);
  EXPECT_EQ(g.nearest(0.9), 4u);
  EXPECT_THROW(g.index_of(0.3), Error);
}
