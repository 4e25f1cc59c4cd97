#include <gtest/gtest.h>

#include <cmath>

#include "osa/error.hpp"
#include "osa/mdp.hpp"
#include "osa/policy.hpp"

using namespace osa;

namespace {

const ValueFunction &default_solve() {
  static const ValueFunction V = solve_single_channel({0.15, 0.1}, RewardParams{});
  return V;
}

ValueFunction zero_value(RewardParams r = {}) {
  const ChannelParams p{0.15, 0.1};
  return ValueFunction(p, r, BeliefGrid::for_channel(p), 50, PenaltyConvention::QFunction);
}

} // namespace

TEST(ThresholdPolicy, ActionRule) {
  std::vector<double> thr(10, 0.3);
  thr.back() = 0.0;
  const ThresholdPolicy p(thr, 4, 10);
  EXPECT_EQ(p.act(0.2, 1), Action::Wait);
  EXPECT_EQ(p.act(0.3, 1), Action::Wait);
  EXPECT_EQ(p.act(0.31, 1), Action::SenseWait);
  EXPECT_EQ(p.act(0.31, 3), Action::SenseWait);
  EXPECT_EQ(p.act(0.31, 4), Action::SenseFallback);
  EXPECT_EQ(p.act(0.0, 10), Action::SenseFallback);
  EXPECT_FALSE(p.cap_binding());
  // Decisions use the largest belief.
  const std::vector<double> beliefs{0.1, 0.5, 0.2};
  EXPECT_EQ(p.decide({beliefs, {}, 2}), Action::SenseWait);
}

TEST(ThresholdPolicy, Validation) {
  EXPECT_THROW(ThresholdPolicy({0.1, 0.2}, 1, 3), Error);
  EXPECT_THROW(ThresholdPolicy({0.1, 1.2, 0.0}, 1, 3), Error);
  EXPECT_THROW(ThresholdPolicy({0.1, 0.1, 0.0}, 4, 3), Error);
  EXPECT_THROW(ThresholdPolicy({0.1, 0.1, 0.0}, 0, 3), Error);
}

TEST(Memoryless, Examples) {
  const MemorylessPolicy mp3(3);
  EXPECT_EQ(memoryless_act(mp3, 1), Action::SenseWait);
  EXPECT_EQ(memoryless_act(mp3, 2), Action::SenseWait);
  EXPECT_EQ(memoryless_act(mp3, 3), Action::SenseFallback);
  const MemorylessPolicy mp1(1);
  for (int l = 1; l < 10; ++l) {
    EXPECT_EQ(memoryless_act(mp1, l), Action::SenseFallback);
  }
  EXPECT_THROW(MemorylessPolicy(0), Error);
  EXPECT_EQ(mp3.describe(), "MP-3");
}

TEST(Thresholds, Th1Th2ZeroContinuation) {
  const auto V = zero_value();
  EXPECT_NEAR(th1(V, 0.0, 1), 0.2, 1e-12);
  EXPECT_NEAR(th2(V, 0.0, 1), 500.0 / 700.0, 1e-12);
  RewardParams more;
  more.c_s = 80;
  EXPECT_GT(th1(zero_value(more), 0.0, 1), th1(V, 0.0, 1));
}

TEST(Thresholds, Th2DependsOnlyOnDelaysOneAndNext) {
  auto V = zero_value();
  const double before = th2(V, 0.4, 3);
  for (std::size_t i = 0; i < V.grid().size(); ++i) {
    V.value(i, 10) = 123.0;
    V.value(i, 2) = -7.0;
  }
  EXPECT_EQ(th2(V, 0.4, 3), before);
}

TEST(Thresholds, DegenerateDenominator) {
  RewardParams r;
  r.phi = 100;
  r.p_p = 100;
  r.c_s = 0;
  const auto V = zero_value(r);
  try {
    th1(V, 0.0, 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateDenominator);
  }
}

TEST(Thresholds, ExtractionMatchesSolverActions) {
  const auto &V = default_solve();
  const auto pol = extract_thresholds(V);
  EXPECT_EQ(pol.lambda_star(V.l_max()), 0.0);
  for (std::size_t i = 0; i < V.grid().size(); ++i) {
    for (int l = 1; l <= V.l_max(); ++l) {
      ASSERT_EQ(pol.act(V.grid()[i], l), V.action(i, l))
          << "belief " << V.grid()[i] << " delay " << l;
    }
  }
}

TEST(Thresholds, FixedPointResidualWithinGridCell) {
  const auto &V = default_solve();
  const auto pol = extract_thresholds(V);
  for (int l = 1; l < V.l_max(); ++l) {
    const double lam = pol.lambda_star(l);
    EXPECT_LE(std::abs(lam - threshold_fixed_point_map(V, lam, l)), V.grid().resolution())
        << "delay " << l;
  }
}

TEST(Thresholds, HugeSensingCostWaitsUntilSwitchDelay) {
  RewardParams r;
  r.c_s = 1000;
  SolverOptions o;
  o.l_max = 20;
  const auto V = solve_single_channel({0.15, 0.1}, r, o);
  const auto pol = extract_thresholds(V);
  for (int l = 1; l < pol.l_star(); ++l) {
    EXPECT_EQ(pol.lambda_star(l), 1.0) << "delay " << l;
    for (std::size_t i = 0; i < V.grid().size(); ++i) {
      ASSERT_EQ(V.action(i, l), Action::Wait) << "delay " << l << " point " << i;
    }
  }
}

TEST(Thresholds, NotThresholdIsDetected) {
  auto V = default_solve();
  // Force a Wait island above a non-Wait region at delay 1.
  const std::size_t n = V.grid().size();
  V.set_action(n - 1, 1, Action::Wait);
  V.set_action(n - 2, 1, Action::SenseWait);
  try {
    extract_thresholds(V);
    FAIL() << "expected NotThreshold";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotThreshold);
    EXPECT_NE(std::string(e.what()).find("delay 1"), std::string::npos);
  }
}

// Q1 - Q2 = (1 - belief) * margin, so the busy-branch sign alone decides
// between the two sensing actions at every belief below 1.
TEST(SwitchDelay, MarginDecidesSensingActions) {
  const auto &V = default_solve();
  for (int l = 1; l < V.l_max(); ++l) {
    const double m = busy_branch_margin(V, l);
    for (double b : {0.0, 0.1, 0.5, 0.9}) {
      const double d = q_sense_wait(V, b, l) - q_sense_fallback(V, b, l);
      EXPECT_NEAR(d, (1.0 - b) * m, 1e-9 * std::max(1.0, std::abs(d)));
    }
  }
  const int ls = dedicated_switch_delay(V);
  for (std::size_t i = 0; i < V.grid().size(); ++i) {
    for (int l = 1; l < V.l_max(); ++l) {
      const Action a = V.action(i, l);
      if (a == Action::Wait || V.grid()[i] == 1.0) {
        continue;
      }
      EXPECT_EQ(a, l < ls ? Action::SenseWait : Action::SenseFallback)
          << "belief " << V.grid()[i] << " delay " << l;
    }
  }
}

TEST(SwitchDelay, CapBindingIsFlagged) {
  const auto pol = extract_thresholds(default_solve());
  EXPECT_EQ(pol.cap_binding(), pol.l_star() == default_solve().l_max());
}

TEST(NeverWaitAfterSensing, Examples) {
  EXPECT_FALSE(never_wait_after_sensing(RewardParams{}));
  RewardParams r;
  r.phi = 900;
  EXPECT_TRUE(never_wait_after_sensing(r));
  SolverOptions o;
  o.l_max = 20;
  const auto V = solve_single_channel({0.15, 0.1}, r, o);
  EXPECT_EQ(dedicated_switch_delay(V), 1);
}

TEST(Structure, PositiveGainInstancePasses) {
  RewardParams r;
  r.phi = 1000;
  r.p_3g = 600;
  SolverOptions o;
  o.l_max = 30;
  const auto V = solve_single_channel({0.6, 0.2}, r, o);
  ASSERT_GT(V.gain(), 0.0);
  const auto rep = check_structure(V);
  EXPECT_TRUE(rep.all_passed()) << rep.to_text();
  EXPECT_EQ(rep.checks.size(), 7u);
}

TEST(Structure, CorruptedValueFailsConvexity) {
  auto V = default_solve();
  V.value(500, 3) += 10.0;
  const auto rep = check_structure(V);
  ASSERT_NE(rep.find("convex_in_belief"), nullptr);
  EXPECT_EQ(rep.find("convex_in_belief")->status, StructureCheck::Status::Fail);
  EXPECT_FALSE(rep.all_passed());
}

TEST(Structure, NegativelyCorrelatedChannelSkipsGatedChecks) {
  SolverOptions o;
  o.l_max = 20;
  const auto V = solve_single_channel({0.2, 0.7}, RewardParams{}, o);
  const auto rep = check_structure(V);
  for (const char *name : {"monotone_in_belief", "no_wait_above_pi0", "wait_region_prefix"}) {
    const auto *c = rep.find(name);
    ASSERT_NE(c, nullptr) << name;
    EXPECT_EQ(c->status, StructureCheck::Status::Skipped);
    EXPECT_EQ(c->detail, "requires alpha >= beta");
  }
  EXPECT_NE(rep.to_text().find("status = skipped"), std::string::npos);
}

// Default prices make every transmission on the dedicated channel a loss, which
// drives the gain below zero; the report must say so rather than pass.
TEST(Structure, NegativeGainIsReportedAgainstPenaltyBound) {
  const auto &V = default_solve();
  ASSERT_LT(V.gain(), 0.0);
  const auto rep = check_structure(V);
  EXPECT_EQ(rep.find("gain_exceeds_penalty")->status, StructureCheck::Status::Fail);
  EXPECT_EQ(rep.find("primary_beats_dedicated")->status, StructureCheck::Status::Pass);
  EXPECT_EQ(rep.find("monotone_in_delay")->status, StructureCheck::Status::Pass);
}
