#include <gtest/gtest.h>

#include <cmath>

#include "osa/channel.hpp"
#include "osa/error.hpp"
#include "osa/rng.hpp"

using namespace osa;

TEST(Channel, StationaryIdleExamples) {
  EXPECT_NEAR(stationary_idle({0.15, 0.1}), 0.1 / 0.95, 1e-15);
  EXPECT_NEAR(stationary_idle({0.15, 0.1}), 0.105263, 1e-6);
  EXPECT_DOUBLE_EQ(stationary_idle({0.95, 0.05}), 0.5);
  EXPECT_DOUBLE_EQ(stationary_idle({0.5, 0.5}), 0.5);
}

TEST(Channel, StationaryIdleDegenerate) {
  try {
    stationary_idle({1.0, 0.0});
    FAIL() << "expected DegenerateChain";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateChain);
  }
  EXPECT_DOUBLE_EQ(stationary_idle({0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(stationary_idle({1.0, 1.0}), 1.0);
  EXPECT_TRUE((ChannelParams{0.0, 0.0}.degenerate()));
  EXPECT_TRUE((ChannelParams{1.0, 0.0}.degenerate()));
  EXPECT_FALSE((ChannelParams{0.15, 0.1}.degenerate()));
}

TEST(Channel, ValidateRejectsNonProbabilities) {
  EXPECT_THROW((ChannelParams{1.2, 0.1}.validate()), Error);
  EXPECT_THROW((ChannelParams{0.5, -0.1}.validate()), Error);
  EXPECT_THROW((ChannelParams{NAN, 0.1}.validate()), Error);
  EXPECT_NO_THROW((ChannelParams{0.0, 1.0}.validate()));
}

TEST(Channel, UnsensedUpdateExamples) {
  const ChannelParams p{0.15, 0.1};
  const double pi0 = stationary_idle(p);
  EXPECT_NEAR(update_unsensed(p, pi0), pi0, 1e-15);
  EXPECT_DOUBLE_EQ(update_unsensed(p, 1.0), 0.15);
  EXPECT_DOUBLE_EQ(update_unsensed(p, 0.0), 0.1);
}

TEST(Channel, SensedUpdate) {
  const ChannelParams p{0.85, 0.7};
  EXPECT_EQ(update_sensed(p, Observation::Idle), 0.85);
  EXPECT_EQ(update_sensed(p, Observation::Busy), 0.7);
}

TEST(Channel, UnsensedUpdateStaysBetweenBetaAndAlpha) {
  Rng rng(3, 1);
  for (int i = 0; i < 2000; ++i) {
    const ChannelParams p{rng.uniform(), rng.uniform()};
    const double b = rng.uniform();
    const double n = update_unsensed(p, b);
    EXPECT_GE(n, std::min(p.alpha, p.beta) - 1e-15);
    EXPECT_LE(n, std::max(p.alpha, p.beta) + 1e-15);
  }
}

TEST(Channel, IterateMatchesRepeatedUpdates) {
  const ChannelParams p{0.95, 0.05};
  double b = 1.0;
  for (std::uint64_t k = 0; k < 60; ++k) {
    EXPECT_NEAR(iterate_unsensed(p, 1.0, k), b, 1e-12) << "k=" << k;
    b = update_unsensed(p, b);
  }
}

TEST(Channel, IterateConvergesToStationary) {
  const ChannelParams p{0.15, 0.1};
  EXPECT_NEAR(iterate_unsensed(p, 0.9, 40), stationary_idle(p), 1e-15);
  // Negatively correlated chains oscillate around pi0 while converging.
  const ChannelParams q{0.1, 0.8};
  const double pi0 = stationary_idle(q);
  const double b1 = iterate_unsensed(q, 1.0, 1);
  const double b2 = iterate_unsensed(q, 1.0, 2);
  EXPECT_LT(b1, pi0);
  EXPECT_GT(b2, pi0);
}

TEST(Channel, TrueStateFrequencyMatchesStationary) {
  const ChannelParams p{0.15, 0.1};
  Rng rng(42, 0x100);
  ChannelState s = sample_stationary(p, rng);
  int idle = 0;
  int idle_idle = 0;
  int idle_prev = 0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    const ChannelState next = step_true_state(p, s, rng);
    if (s == ChannelState::Idle) {
      ++idle_prev;
      idle_idle += next == ChannelState::Idle;
    }
    idle += next == ChannelState::Idle;
    s = next;
  }
  EXPECT_NEAR(static_cast<double>(idle) / n, stationary_idle(p), 0.005);
  EXPECT_NEAR(static_cast<double>(idle_idle) / idle_prev, p.alpha, 0.01);
}

TEST(Channel, AbsorbingChainsStayPut) {
  Rng rng(1, 2);
  EXPECT_EQ(step_true_state({1.0, 0.0}, ChannelState::Idle, rng), ChannelState::Idle);
  EXPECT_EQ(step_true_state({1.0, 0.0}, ChannelState::Busy, rng), ChannelState::Busy);
  EXPECT_EQ(sample_stationary({1.0, 0.0}, rng), ChannelState::Idle);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a(7, 0x100), b(7, 0x100), c(7, 0x101);
  bool differs = false;
  for (int i = 0; i < 16; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs |= x != c.uniform();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(derive_seed(1, 0x100), derive_seed(2, 0x100));
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng r(5, 9);
  int counts[7] = {};
  for (int i = 0; i < 70000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) {
    EXPECT_NEAR(c, 10000, 400);
  }
}
