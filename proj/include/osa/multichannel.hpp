#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "osa/channel.hpp"
#include "osa/mdp.hpp"
#include "osa/rewards.hpp"

namespace osa {

/// What the secondary user remembers about one channel: its last observation
/// and how many slots ago it was taken. Encoded in one byte:
///   0                     never observed, or observed >= k_trunc slots ago (belief pi(0))
///   1 + age               sensed idle `age` slots before the current one
///   1 + k_trunc + age     sensed busy `age` slots before the current one
/// with 0 <= age < k_trunc. Age 0 means "sensed in the previous slot".
class ChannelMemoryCodec {
public:
  ChannelMemoryCodec(ChannelParams p, int k_trunc);

  int k_trunc() const { return k_trunc_; }
  int code_count() const { return 2 * k_trunc_ + 1; }

  std::uint8_t fresh(Observation obs) const;
  std::uint8_t aged(std::uint8_t code) const;
  double belief(std::uint8_t code) const { return beliefs_[code]; }

private:
  ChannelParams p_;
  int k_trunc_;
  std::vector<double> beliefs_;
};

struct MultiChannelOptions {
  int n_channels = 4;
  int k_trunc = 20;
  int l_max = 15;
  double tol = 1e-9;
  int max_iter = 100000;
  double damping = 0.5;
  /// Cap on descriptors x delays before StateSpaceTooLarge is raised.
  std::size_t max_states = 20'000'000;
  PenaltyConvention convention = PenaltyConvention::QFunction;
};

/// The finite set of belief-vector descriptors reachable from the all-unknown
/// start under the max-belief sensing rule. Descriptors are stored as sorted
/// code multisets so channel permutations share one id.
class ReachableStates {
public:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  ReachableStates(const ChannelParams &p, int n_channels, int k_trunc,
                  std::size_t max_descriptors);

  const ChannelMemoryCodec &codec() const { return codec_; }
  int n_channels() const { return n_channels_; }
  std::size_t size() const { return sensed_.size(); }

  std::span<const std::uint8_t> codes(std::size_t d) const;
  /// Canonical id of an arbitrary (unsorted) code vector, kNone if unreachable.
  std::uint32_t find(std::span<const std::uint8_t> codes) const;

  /// Position (within the sorted codes) of the channel that would be sensed.
  std::size_t sensed_slot(std::size_t d) const { return sensed_[d]; }
  double sensed_belief(std::size_t d) const {
    return codec_.belief(codes(d)[sensed_[d]]);
  }

  std::uint32_t after_wait(std::size_t d) const { return wait_[d]; }
  std::uint32_t after_idle(std::size_t d) const { return idle_[d]; }
  std::uint32_t after_busy(std::size_t d) const { return busy_[d]; }

  /// The start descriptor (every channel at pi(0)); always id 0.
  static constexpr std::uint32_t start() { return 0; }

private:
  std::uint64_t key(std::span<const std::uint8_t> sorted) const;

  ChannelMemoryCodec codec_;
  int n_channels_;
  std::vector<std::uint8_t> codes_;
  std::vector<std::uint32_t> sensed_;
  std::vector<std::uint32_t> wait_, idle_, busy_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

/// Which sensing index a multichannel state uses for the max-belief channel.
std::size_t max_belief_index(std::span<const double> beliefs);

/// Relative value function over (reachable descriptor x delay).
class MultiChannelSolution {
public:
  MultiChannelSolution(ChannelParams channel, RewardParams rewards,
                       ReachableStates states, int l_max,
                       PenaltyConvention convention);

  const ChannelParams &channel() const { return channel_; }
  const RewardParams &rewards() const { return rewards_; }
  const ReachableStates &states() const { return states_; }
  int l_max() const { return l_max_; }
  PenaltyConvention convention() const { return convention_; }

  double gain() const { return gain_; }
  void set_gain(double g) { gain_ = g; }
  double value(std::size_t d, int delay) const { return v_[slot(d, delay)]; }
  Action action(std::size_t d, int delay) const { return actions_[slot(d, delay)]; }
  std::vector<double> &table() { return v_; }
  const std::vector<double> &table() const { return v_; }
  std::vector<Action> &action_table() { return actions_; }

  /// Q-values at a descriptor (delay == l_max admits only SenseFallback).
  void q_values(std::size_t d, int delay, double (&q)[3]) const;

  int iterations = 0;
  double final_span = 0.0;

private:
  std::size_t slot(std::size_t d, int delay) const {
    return d * static_cast<std::size_t>(l_max_) + static_cast<std::size_t>(delay - 1);
  }

  ChannelParams channel_;
  RewardParams rewards_;
  ReachableStates states_;
  int l_max_;
  PenaltyConvention convention_;
  double gain_ = 0.0;
  std::vector<double> v_;
  std::vector<Action> actions_;
};

/// Enumerate the reachable descriptor set; StateSpaceTooLarge above the cap.
ReachableStates build_reachable_states(const ChannelParams &p, int n_channels,
                                       int k_trunc, int l_max,
                                       std::size_t max_states = 20'000'000);

/// Relative value iteration over the reachable-descriptor MDP for N i.i.d.
/// channels where sensing always targets the max-belief channel.
MultiChannelSolution solve_multichannel(const ChannelParams &p, const RewardParams &r,
                                        const MultiChannelOptions &opts = {});

} // namespace osa
