#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <ostream>
#include <string>
#include <vector>

#include "osa/channel.hpp"
#include "osa/mdp.hpp"
#include "osa/multichannel.hpp"
#include "osa/policy.hpp"
#include "osa/rewards.hpp"

namespace osa {

struct SimConfig {
  std::uint64_t num_packets = 3000;
  std::uint64_t seed = 1;
  std::vector<ChannelParams> channels{{0.15, 0.1}};
  RewardParams rewards;
  int l_max = 50;
  /// Energy counts sensing plus both transmission prices; false keeps c_s only.
  bool energy_includes_prices = true;
  PenaltyConvention convention = PenaltyConvention::QFunction;

  void validate() const;
};

struct SimMetrics {
  double avg_delay = 0.0;
  double energy_per_packet = 0.0;
  double energy_per_slot = 0.0;
  double throughput = 0.0;
  double avg_reward = 0.0;
  std::uint64_t slots = 0;
  std::uint64_t packets = 0;
  std::uint64_t senses = 0;
  std::uint64_t primary_tx = 0;
  std::uint64_t dedicated_tx = 0;
  std::uint64_t waits = 0;
  double total_energy = 0.0;
  double total_reward = 0.0;
  /// Fraction of slots that opened a fresh packet (delay 1).
  double fresh_slot_fraction = 0.0;

  friend bool operator==(const SimMetrics &, const SimMetrics &) = default;
};

struct TraceRow {
  std::uint64_t t = 0;
  double belief_sensed_channel = 0.0; ///< max belief (the channel that would be sensed)
  int delay = 1;
  Action action = Action::Wait;
  std::optional<Observation> observation;
  double reward = 0.0;
  std::vector<double> beliefs; ///< full belief vector at the start of the slot
  std::size_t sensed_channel = 0;
};

using TraceSink = std::function<void(const TraceRow &)>;

/// Result of one simulated slot.
struct SlotOutcome {
  Action action = Action::Wait;
  std::size_t sensed_channel = 0;
  std::optional<Observation> observation;
  bool transmitted = false;
  int delay = 1; ///< packet delay during this slot
  double reward = 0.0;
};

/// A running secondary user over a set of channels. Channel sample paths use
/// one random stream per channel, so two episodes with the same seed see the
/// same primary-user activity regardless of the policy (common random numbers).
class Episode {
public:
  explicit Episode(const SimConfig &cfg);

  /// Advance one slot; throws DelayOverflow if the delay would pass l_max.
  SlotOutcome step(const Policy &policy, const TraceSink &trace = {});

  const SimConfig &config() const { return cfg_; }
  std::span<const double> beliefs() const { return belief_; }
  std::span<const ChannelState> true_states() const { return state_; }
  int delay() const { return delay_; }

  /// Metrics over all slots stepped so far.
  SimMetrics metrics() const;

private:
  SimConfig cfg_;
  std::vector<Rng> rng_;
  std::vector<ChannelState> state_;
  std::vector<double> belief_;
  std::vector<ChannelMemory> memory_;
  int delay_ = 1;
  SimMetrics m_;
  std::uint64_t delay_sum_ = 0;
  std::uint64_t fresh_slots_ = 0;
  TraceRow row_;
};

/// Slot-level simulation until cfg.num_packets have been delivered.
/// Throws DelayOverflow if the packet delay would exceed cfg.l_max.
SimMetrics run_episode(const SimConfig &cfg, const Policy &policy,
                       const TraceSink &trace = {});

/// Delay-counting shift between the simulator's convention (a packet sent in
/// its first slot has delay 1) and the Little identity E(D) = 1 + 1/thp.
/// Pinned so that MP-1 (delay 1, throughput 1) has zero residual.
inline constexpr double kLittleDelayShift = 1.0;

/// |avg_delay + shift - (1 + 1/throughput)|.
double little_check(const SimMetrics &m);

/// Optimal policy for a (symmetric) channel set: single-channel threshold
/// policy for one channel, descriptor policy for several.
struct SolverKnobs {
  SolverOptions single;
  MultiChannelOptions multi;
};
std::shared_ptr<const Policy> solve_optimal_policy(const SimConfig &cfg,
                                                   const SolverKnobs &knobs = {});

struct SweepRow {
  double gamma = 0.0;
  SimMetrics metrics;
};

/// One solve + one episode per gamma, all with the same seed.
std::vector<SweepRow> sweep_gamma(const SimConfig &base, const std::vector<double> &gammas,
                                  const SolverKnobs &knobs = {});

struct GammaSearchResult {
  double gamma = 0.0;
  double achieved_delay = 0.0;
  bool within_tol = false;
  int evaluations = 0;
  SimMetrics metrics;
};

struct GammaSearchOptions {
  double gamma_lo = 0.0;
  double gamma_hi = 2000.0;
  int max_bisections = 40;
};

/// Bisection on gamma using that average delay is non-increasing in gamma.
/// Throws TargetUnreachable if the target lies outside [delay(hi), delay(lo)].
/// Average delay is a step function of gamma, so the closest achievable point is
/// returned with within_tol=false when no gamma lands inside the tolerance.
GammaSearchResult gamma_for_target_delay(const SimConfig &base, double target_delay,
                                         double tol, const SolverKnobs &knobs = {},
                                         const GammaSearchOptions &search = {});

struct CompareRow {
  int k = 0;
  bool delay_matched = false; ///< optimal delay within tolerance of MP-k's
  double matched_delay = 0.0;  ///< MP-k average delay
  double achieved_delay = 0.0; ///< optimal policy at the matched gamma
  double gamma = 0.0;
  double cost_mp = 0.0;
  double cost_opt = 0.0;
  double reduction_pct = 0.0;
};

std::vector<CompareRow> compare_with_memoryless(const SimConfig &cfg,
                                                const std::vector<int> &k_values,
                                                double delay_tol = 0.1,
                                                const SolverKnobs &knobs = {},
                                                const GammaSearchOptions &search = {});

} // namespace osa
