#pragma once

#include <iosfwd>
#include <string>

#include "osa/channel.hpp"
#include "osa/rewards.hpp"

namespace osa {

/// A symmetric experiment: N identical channels plus the reward parameters.
struct Scenario {
  std::string name;
  int n_channels = 1;
  ChannelParams channel{0.15, 0.1};
  RewardParams rewards;
  int l_max = 50;

  void validate() const;
  friend bool operator==(const Scenario &, const Scenario &) = default;
};

/// Multichannel presets 1..3 (four channels, L_max 15):
///   1: often occupied (0.15, 0.10)
///   2: often idle     (0.85, 0.70)
///   3: slow           (0.95, 0.05)
Scenario scenario_preset(int id);

/// Single-channel sensing-cost study: one channel (0.15, 0.10), L_max 50.
Scenario single_channel_scenario();

void write_scenario_ini(std::ostream &os, const Scenario &s);
/// Missing keys keep the values already in `base`.
Scenario read_scenario_ini(std::istream &is, Scenario base = {});

} // namespace osa
