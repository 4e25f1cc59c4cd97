#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "osa/channel.hpp"
#include "osa/policy.hpp"
#include "osa/rewards.hpp"

namespace osa {

/// Sensing counters for one channel.
///   K: idle observations whose previous-slot observation was also idle
///   I: idle observations
///   M: all observations
struct ChannelCounts {
  std::uint64_t k = 0;
  std::uint64_t i = 0;
  std::uint64_t m = 0;

  friend bool operator==(const ChannelCounts &, const ChannelCounts &) = default;
};

class CountingStats {
public:
  explicit CountingStats(std::size_t n_channels = 1) : counts_(n_channels) {}

  std::size_t size() const { return counts_.size(); }
  const ChannelCounts &channel(std::size_t i) const { return counts_.at(i); }
  ChannelCounts &channel(std::size_t i) { return counts_.at(i); }

  /// Sum of counters over all channels (used for i.i.d. channels).
  ChannelCounts pooled() const;

private:
  std::vector<ChannelCounts> counts_;
};

/// Records one sensing event on `channel`. `prev_sensed_idle` must be true
/// only if the same channel was sensed idle in the immediately preceding slot.
void update_counts(CountingStats &stats, std::size_t channel, bool prev_sensed_idle,
                   Observation obs);

/// Tracks consecutive-slot pairs automatically: call `observe` for the sensed
/// channel (if any) once per slot, then `end_slot`.
class SensingRecorder {
public:
  explicit SensingRecorder(std::size_t n_channels)
      : stats_(n_channels), idle_now_(n_channels, false), idle_prev_(n_channels, false) {}

  void observe(std::size_t channel, Observation obs);
  void end_slot();

  const CountingStats &stats() const { return stats_; }

private:
  CountingStats stats_;
  std::vector<bool> idle_now_;
  std::vector<bool> idle_prev_;
};

struct Estimates {
  double alpha = 0.0;
  double beta = 0.0;
  double pi0 = 0.0;
  /// False when every sensed slot was idle; beta is then clamped to 1.
  bool beta_defined = true;
};

/// alpha = K/I, pi0 = I/M, beta = (1-alpha) pi0 / (1-pi0) clamped to [0,1].
/// Throws InsufficientData if I or M is zero.
Estimates estimate(const ChannelCounts &c);
Estimates estimate(const CountingStats &stats, std::size_t channel);

struct BinPair {
  int alpha = 0;
  int beta = 0;
  friend bool operator==(const BinPair &, const BinPair &) = default;
};

int discretize(double value, int m);
BinPair discretize(const Estimates &est, int m);

/// Senses one channel every slot for `slots` slots and returns the counters.
CountingStats sense_continuously(const ChannelParams &p, std::uint64_t slots,
                                 std::uint64_t seed);

/// Candidate policy family: constant wait threshold crossed with switch delay.
struct CandidateSet {
  std::vector<double> levels{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int max_switch_delay = 15; ///< switch delays 1..max_switch_delay

  std::size_t size() const { return levels.size() * static_cast<std::size_t>(max_switch_delay); }
  double level(std::size_t id) const;
  int switch_delay(std::size_t id) const;
  ThresholdPolicy make(std::size_t id, int l_max) const;
};

enum class QWeighting {
  AsPrinted,    ///< Q <- rho Q + (1 - rho) target
  Conventional, ///< Q <- (1 - rho) Q + rho target
};

struct LearnerConfig {
  int m = 10;
  int nbslot = 100;
  double epsilon = 0.1;
  double eta = 0.5;
  /// Learning rate as a function of the iteration counter k >= 1.
  std::function<double(std::uint64_t)> rho = [](std::uint64_t k) {
    return 1.0 / static_cast<double>(k);
  };
  QWeighting weighting = QWeighting::AsPrinted;
  CandidateSet candidates;
  /// Estimates used until the counters allow a real estimate.
  double initial_alpha = 0.5;
  double initial_beta = 0.5;
  int l_max = 15;
  PenaltyConvention convention = PenaltyConvention::QFunction;

  void validate() const;
};

class QTable {
public:
  QTable(int m, std::size_t n_policies);

  int bins() const { return m_; }
  std::size_t policies() const { return n_; }
  double &at(BinPair b, std::size_t policy);
  double at(BinPair b, std::size_t policy) const;
  /// Argmax over policies; ties go to the lowest id.
  std::size_t greedy(BinPair b) const;
  const std::vector<double> &raw() const { return q_; }

private:
  std::size_t offset(BinPair b, std::size_t policy) const;
  int m_;
  std::size_t n_;
  std::vector<double> q_;
};

struct LearnTraceRow {
  std::uint64_t iteration = 0;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  std::size_t policy_id = 0;
  double window_reward = 0.0;
  double q_value = 0.0; ///< updated Q(prev bins, prev policy)
  bool explored = false;
};

struct LearningResult {
  QTable q;
  std::vector<LearnTraceRow> trace;
  CountingStats stats;
  Estimates final_estimates;
  BinPair final_bins;
  std::size_t greedy_policy = 0;
  ThresholdPolicy learned;
};

/// Runs the learner for `iterations` windows over the given channels.
LearningResult run_learning(const LearnerConfig &cfg, const std::vector<ChannelParams> &channels,
                            const RewardParams &rewards, std::uint64_t iterations,
                            std::uint64_t seed);

} // namespace osa
