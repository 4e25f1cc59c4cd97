#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "osa/error.hpp"
#include "osa/mdp.hpp"
#include "osa/multichannel.hpp"

using namespace osa;

TEST(Codec, BeliefsFollowTheUnsensedRecursion) {
  const ChannelParams p{0.15, 0.1};
  const ChannelMemoryCodec c(p, 20);
  EXPECT_EQ(c.code_count(), 41);
  EXPECT_DOUBLE_EQ(c.belief(0), stationary_idle(p));
  const auto idle = c.fresh(Observation::Idle);
  const auto busy = c.fresh(Observation::Busy);
  EXPECT_DOUBLE_EQ(c.belief(idle), p.alpha);
  EXPECT_DOUBLE_EQ(c.belief(busy), p.beta);
  EXPECT_NEAR(c.belief(c.aged(idle)), update_unsensed(p, p.alpha), 1e-15);
  auto code = busy;
  for (int age = 1; age < 20; ++age) {
    code = c.aged(code);
    EXPECT_NEAR(c.belief(code), iterate_unsensed(p, p.beta, static_cast<std::uint64_t>(age)),
                1e-14);
  }
  EXPECT_EQ(c.aged(code), 0);
  EXPECT_EQ(c.aged(0), 0);
  EXPECT_THROW(ChannelMemoryCodec(p, 0), Error);
  EXPECT_THROW(ChannelMemoryCodec(p, 128), Error);
}

TEST(Reachable, SingleChannelShortMemory) {
  const auto s = build_reachable_states({0.15, 0.1}, 1, 1, 10);
  // Unknown, idle last slot, busy last slot.
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.codes(ReachableStates::start())[0], 0);
}

TEST(Reachable, PermutationsShareOneId) {
  const auto s = build_reachable_states({0.15, 0.1}, 3, 5, 10);
  bool checked = false;
  for (std::size_t d = 0; d < s.size(); ++d) {
    auto c = std::vector<std::uint8_t>(s.codes(d).begin(), s.codes(d).end());
    if (c[0] == c[1] && c[1] == c[2]) {
      continue;
    }
    std::reverse(c.begin(), c.end());
    EXPECT_EQ(s.find(c), d);
    std::rotate(c.begin(), c.begin() + 1, c.end());
    EXPECT_EQ(s.find(c), d);
    checked = true;
  }
  EXPECT_TRUE(checked);
  const std::vector<std::uint8_t> bogus{200, 200, 200};
  EXPECT_EQ(s.find(bogus), ReachableStates::kNone);
}

TEST(Reachable, TransitionsStayInsideTheSet) {
  const auto s = build_reachable_states({0.85, 0.7}, 3, 6, 10);
  for (std::size_t d = 0; d < s.size(); ++d) {
    EXPECT_LT(s.after_wait(d), s.size());
    EXPECT_LT(s.after_idle(d), s.size());
    EXPECT_LT(s.after_busy(d), s.size());
    // The sensed channel is the one with the largest belief.
    const auto codes = s.codes(d);
    for (auto c : codes) {
      EXPECT_LE(s.codec().belief(c), s.sensed_belief(d));
    }
  }
}

TEST(Reachable, ScenarioOneSize) {
  const auto s = build_reachable_states({0.15, 0.1}, 4, 20, 15);
  EXPECT_EQ(s.size(), 12783u);
}

TEST(Reachable, CapRaisesStateSpaceTooLarge) {
  try {
    build_reachable_states({0.15, 0.1}, 4, 20, 15, 1000);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::StateSpaceTooLarge);
  }
  EXPECT_THROW(build_reachable_states({0.15, 0.1}, 9, 2, 15), Error);
}

TEST(MaxBelief, TiesGoToLowestIndex) {
  const std::vector<double> b{0.2, 0.7, 0.7, 0.1};
  EXPECT_EQ(max_belief_index(b), 1u);
  const std::vector<double> one{0.4};
  EXPECT_EQ(max_belief_index(one), 0u);
}

// With one channel and a long memory every reachable belief is represented
// exactly, so the descriptor solve and the grid solve describe the same MDP.
TEST(MultiChannel, OneChannelMatchesGridSolver) {
  const ChannelParams p{0.6, 0.2};
  RewardParams r;
  r.phi = 700;
  r.p_3g = 500;
  MultiChannelOptions mo;
  mo.n_channels = 1;
  mo.k_trunc = 60;
  mo.l_max = 20;
  const auto M = solve_multichannel(p, r, mo);
  SolverOptions so;
  so.l_max = 20;
  const auto V = solve_single_channel(p, r, so);
  EXPECT_NEAR(M.gain(), V.gain(), 1e-3 * std::max(1.0, std::abs(V.gain())));

  const auto &s = M.states();
  int agree = 0, total = 0;
  for (std::size_t d = 0; d < s.size(); ++d) {
    for (int l = 1; l <= 20; ++l) {
      double q[3];
      q_values(V, s.sensed_belief(d), l, q);
      ++total;
      agree += static_cast<std::size_t>(M.action(d, l)) == best_action_index(q);
    }
  }
  EXPECT_GE(static_cast<double>(agree) / total, 0.99);
}

TEST(MultiChannel, ScenarioOneConvergesAndOnlyFallsBackAtCap) {
  MultiChannelOptions mo;
  const auto M = solve_multichannel({0.15, 0.1}, RewardParams{}, mo);
  EXPECT_LE(M.final_span, mo.tol);
  EXPECT_EQ(M.value(ReachableStates::start(), 1), 0.0);
  for (std::size_t d = 0; d < M.states().size(); ++d) {
    EXPECT_EQ(M.action(d, mo.l_max), Action::SenseFallback);
  }
}

TEST(MultiChannel, RejectsDegenerateChannel) {
  EXPECT_THROW(solve_multichannel({1.0, 0.0}, RewardParams{}), Error);
}
