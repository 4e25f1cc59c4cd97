#pragma once

#include <cmath>
#include <cstdint>

namespace osa {

/// Which slots pay the delay penalty.
///   QFunction:   only slots where the packet is held (Wait, busy SenseWait).
///   RewardTable: every slot, including the transmission slot.
enum class PenaltyConvention : std::uint8_t { QFunction = 0, RewardTable = 1 };

struct RewardParams {
  double phi = 350.0;  ///< gain per delivered packet
  double c_s = 50.0;   ///< sensing cost
  double p_p = 100.0;  ///< price of a primary-channel transmission
  double p_3g = 800.0; ///< price of a dedicated-channel transmission
  double gamma = 10.0; ///< delay-penalty coefficient

  /// Throws InvalidArgument on negative costs, non-finite entries, or p_3g <= p_p.
  /// phi - c_s - p_p >= 0 is reported by idle_reward_nonnegative() rather than
  /// enforced, so dominated-sensing instances can still be solved.
  void validate() const;

  /// phi - c_s - p_p >= 0: an idle-channel transmission pays for itself.
  bool idle_reward_nonnegative() const { return phi - c_s - p_p >= 0.0; }

  /// f(l) = gamma * ln(l); f(1) = 0.
  double delay_penalty(int delay) const {
    return gamma * std::log(static_cast<double>(delay));
  }

  friend bool operator==(const RewardParams &, const RewardParams &) = default;
};

} // namespace osa
