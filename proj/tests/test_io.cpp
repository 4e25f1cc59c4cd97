#include <gtest/gtest.h>

#include <sstream>

#include "osa/error.hpp"
#include "osa/io.hpp"
#include "osa/scenario.hpp"

using namespace osa;

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 776.3, -2.5e-17, 0.0, 1e300}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(-0.0), "0");
}

TEST(PolicyCsv, RoundTrip) {
  const ThresholdPolicy p({0.3, 0.25, 0.1, 0.0, 0.0}, 3, 5);
  std::stringstream ss;
  write_policy_csv(ss, p);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "delay,lambda_star,action_above_threshold");
  ss.seekg(0);
  const auto q = read_policy_csv(ss);
  EXPECT_EQ(q.l_star(), 3);
  EXPECT_EQ(q.l_max(), 5);
  ASSERT_EQ(q.thresholds().size(), 5u);
  for (int l = 1; l <= 5; ++l) {
    EXPECT_EQ(q.lambda_star(l), p.lambda_star(l));
  }
}

TEST(PolicyCsv, RejectsGarbage) {
  std::stringstream ss("delay,lambda_star,action_above_threshold\n1,abc,1\n");
  EXPECT_THROW(read_policy_csv(ss), Error);
  std::stringstream empty;
  EXPECT_THROW(read_policy_csv(empty), Error);
}

TEST(ScenarioIni, RoundTripAndPartialOverride) {
  const auto s = scenario_preset(2);
  std::stringstream ss;
  write_scenario_ini(ss, s);
  EXPECT_EQ(read_scenario_ini(ss), s);

  std::stringstream partial("[channel]\nalpha=0.4\n[rewards]\ngamma=7\n");
  const auto t = read_scenario_ini(partial, s);
  EXPECT_EQ(t.channel.alpha, 0.4);
  EXPECT_EQ(t.channel.beta, s.channel.beta);
  EXPECT_EQ(t.rewards.gamma, 7.0);
  EXPECT_EQ(t.n_channels, s.n_channels);
}

TEST(ScenarioIni, InvalidValuesRejected) {
  std::stringstream bad("[channel]\nalpha=1.5\n");
  EXPECT_THROW(read_scenario_ini(bad), Error);
}

TEST(Scenario, Presets) {
  EXPECT_EQ(scenario_preset(1).channel.alpha, 0.15);
  EXPECT_EQ(scenario_preset(3).channel.beta, 0.05);
  EXPECT_EQ(scenario_preset(1).n_channels, 4);
  EXPECT_EQ(single_channel_scenario().n_channels, 1);
  EXPECT_EQ(single_channel_scenario().l_max, 50);
  EXPECT_THROW(scenario_preset(4), Error);
}

TEST(Manifest, RoundTrip) {
  Manifest m{"simulate", {{"seed", "3"}, {"argv", "simulate --mp 2 --out x"}}, {"metrics.csv"}};
  std::stringstream ss;
  write_manifest(ss, m);
  const auto r = read_manifest(ss);
  EXPECT_EQ(r.command, m.command);
  EXPECT_EQ(r.params, m.params);
  EXPECT_EQ(r.outputs, m.outputs);
}

TEST(Csv, Headers) {
  std::stringstream a;
  write_metrics_header(a);
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "gamma,avg_delay,energy_per_packet,energy_per_slot,throughput,avg_reward,senses,"
            "primary_tx,dedicated_tx");
  std::stringstream b;
  write_compare_csv(b, {});
  EXPECT_EQ(b.str(), "k,mp_delay,opt_delay,gamma,delay_matched,energy_per_packet_mp,"
                     "energy_per_packet_opt,reduction_pct\n");
  std::stringstream c;
  write_learn_trace_csv(c, {});
  EXPECT_EQ(c.str(), "iteration,alpha_hat,beta_hat,policy_id,window_reward,q_value\n");
  std::stringstream d;
  csv_trace_sink(d);
  EXPECT_EQ(d.str(), "t,belief_sensed_channel,delay,action,observation,reward\n");
}
