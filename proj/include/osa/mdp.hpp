#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "osa/belief_grid.hpp"
#include "osa/channel.hpp"
#include "osa/rewards.hpp"

namespace osa {

enum class Action : std::uint8_t {
  Wait = 0,          ///< stay inactive this slot
  SenseWait = 1,     ///< sense; transmit if idle, else hold the packet
  SenseFallback = 2, ///< sense; transmit if idle, else use the dedicated channel
};

std::string_view to_string(Action a);

/// Lower index wins when two Q-values agree to within this (relative) tolerance.
inline constexpr double kTieTolerance = 1e-12;

/// Index of the best of three Q-values with the tie rule above.
std::size_t best_action_index(const double (&q)[3]);

struct SolverOptions {
  int l_max = 50;
  double tol = 1e-9;
  int max_iter = 100000;
  /// Aperiodicity transform V <- (1-tau) V + tau T(V); tau = 1 is plain
  /// relative value iteration, which can cycle on periodic optimal chains.
  double damping = 0.5;
  std::size_t grid_intervals = 1000;
  PenaltyConvention convention = PenaltyConvention::QFunction;
};

/// Relative value table over (belief grid x delay 1..l_max) plus the gain.
class ValueFunction {
public:
  ValueFunction(ChannelParams channel, RewardParams rewards, BeliefGrid grid,
                int l_max, PenaltyConvention convention);

  const ChannelParams &channel() const { return channel_; }
  const RewardParams &rewards() const { return rewards_; }
  const BeliefGrid &grid() const { return grid_; }
  int l_max() const { return l_max_; }
  PenaltyConvention convention() const { return convention_; }
  double pi0() const { return pi0_; }

  double gain() const { return gain_; }
  void set_gain(double g) { gain_ = g; }

  double value(std::size_t i, int delay) const { return v_[slot(i, delay)]; }
  double &value(std::size_t i, int delay) { return v_[slot(i, delay)]; }
  Action action(std::size_t i, int delay) const { return actions_[slot(i, delay)]; }
  void set_action(std::size_t i, int delay, Action a) { actions_[slot(i, delay)] = a; }

  std::vector<double> &table() { return v_; }
  const std::vector<double> &table() const { return v_; }

  std::size_t alpha_index() const { return alpha_index_; }
  std::size_t beta_index() const { return beta_index_; }
  /// Relative-VI reference state: (grid point nearest pi(0), delay 1).
  std::size_t reference_index() const { return reference_index_; }

  int iterations = 0;
  double final_span = 0.0;

private:
  std::size_t slot(std::size_t i, int delay) const {
    return i * static_cast<std::size_t>(l_max_) + static_cast<std::size_t>(delay - 1);
  }

  ChannelParams channel_;
  RewardParams rewards_;
  BeliefGrid grid_;
  int l_max_;
  PenaltyConvention convention_;
  double pi0_;
  std::size_t alpha_index_;
  std::size_t beta_index_;
  std::size_t reference_index_;
  double gain_ = 0.0;
  std::vector<double> v_;
  std::vector<Action> actions_;
};

/// Piecewise-linear interpolation of V(., delay); exact at grid points.
double interpolate(const ValueFunction &V, double belief, int delay);

/// Delay reached after holding the packet one more slot.
inline int next_delay(int delay, int l_max) { return delay < l_max ? delay + 1 : l_max; }

double q_wait(const ValueFunction &V, double belief, int delay);
double q_sense_wait(const ValueFunction &V, double belief, int delay);
double q_sense_fallback(const ValueFunction &V, double belief, int delay);

/// Q-values of the admissible actions; at delay == l_max only SenseFallback is
/// admissible and the others are -inf.
void q_values(const ValueFunction &V, double belief, int delay, double (&q)[3]);

struct BackupResult {
  std::vector<double> values; ///< T(V) minus its value at the reference state
  double gain = 0.0;          ///< T(V) at the reference state
  std::vector<Action> actions;
};

/// One undamped Bellman backup over every grid state.
BackupResult bellman_backup(const ValueFunction &V);

/// Average-reward relative value iteration for one channel. Requires a
/// non-degenerate channel. Throws NoConvergence after max_iter.
ValueFunction solve_single_channel(const ChannelParams &p, const RewardParams &r,
                                   const SolverOptions &opts = {});
ValueFunction solve_single_channel(const ChannelParams &p, const RewardParams &r,
                                   BeliefGrid grid, const SolverOptions &opts);

} // namespace osa
