#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "osa/learn.hpp"
#include "osa/mdp.hpp"
#include "osa/policy.hpp"
#include "osa/sim.hpp"

namespace osa {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// `belief,delay,value,action`, one row per grid point and delay.
void write_value_csv(std::ostream &os, const ValueFunction &V);
/// Gain and solver metadata as key=value sections.
void write_value_sidecar(std::ostream &os, const ValueFunction &V);

/// `delay,lambda_star,action_above_threshold`.
void write_policy_csv(std::ostream &os, const ThresholdPolicy &p);
ThresholdPolicy read_policy_csv(std::istream &is);

/// `gamma,avg_delay,energy_per_packet,energy_per_slot,throughput,avg_reward,senses,primary_tx,dedicated_tx`.
void write_metrics_header(std::ostream &os);
void write_metrics_row(std::ostream &os, double gamma, const SimMetrics &m);

/// `t,belief_sensed_channel,delay,action,observation,reward`; the returned
/// sink writes rows to `os` (header written immediately).
TraceSink csv_trace_sink(std::ostream &os);

void write_compare_csv(std::ostream &os, const std::vector<CompareRow> &rows);

/// `iteration,alpha_hat,beta_hat,policy_id,window_reward,q_value`.
void write_learn_trace_csv(std::ostream &os, const std::vector<LearnTraceRow> &rows);

/// Run record: command, parameters, seed, version and produced files.
struct Manifest {
  std::string command;
  std::map<std::string, std::string> params;
  std::vector<std::string> outputs;
};
void write_manifest(std::ostream &os, const Manifest &m);
Manifest read_manifest(std::istream &is);

} // namespace osa
