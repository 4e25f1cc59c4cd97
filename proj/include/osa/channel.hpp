#pragma once

#include <cstdint>

#include "osa/rng.hpp"

namespace osa {

/// Two-state Markov occupancy of one licensed channel.
///   alpha = P[idle -> idle], beta = P[busy -> idle].
struct ChannelParams {
  double alpha = 0.0;
  double beta = 0.0;

  /// Throws InvalidArgument unless both entries are probabilities.
  void validate() const;

  /// True when the stationary idle probability is 0 or 1 (or undefined).
  bool degenerate() const;

  /// alpha >= beta: the regime in which the single-channel structure results hold.
  bool positively_correlated() const { return alpha >= beta; }

  friend bool operator==(const ChannelParams &, const ChannelParams &) = default;
};

enum class Observation : std::uint8_t { Idle = 0, Busy = 1 };
enum class ChannelState : std::uint8_t { Idle = 0, Busy = 1 };

/// pi(0) = beta / (1 - alpha + beta). Throws DegenerateChain when alpha = 1, beta = 0.
double stationary_idle(const ChannelParams &p);

/// One unsensed slot of belief propagation.
inline double update_unsensed(const ChannelParams &p, double belief) {
  return p.beta + (p.alpha - p.beta) * belief;
}

/// Belief for the next slot after the channel was sensed this slot.
inline double update_sensed(const ChannelParams &p, Observation obs) {
  return obs == Observation::Idle ? p.alpha : p.beta;
}

/// k-fold update_unsensed in closed form: pi0 + (alpha - beta)^k (b0 - pi0).
double iterate_unsensed(const ChannelParams &p, double b0, std::uint64_t k);

ChannelState step_true_state(const ChannelParams &p, ChannelState s, Rng &rng);

/// Draw from the stationary distribution (Idle w.p. pi(0)); degenerate chains
/// start Idle when alpha = 1 and beta = 0.
ChannelState sample_stationary(const ChannelParams &p, Rng &rng);

} // namespace osa
