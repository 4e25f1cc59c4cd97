#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osa/channel.hpp"
#include "osa/mdp.hpp"
#include "osa/multichannel.hpp"
#include "osa/rewards.hpp"

namespace osa {

/// Per-channel observation memory as tracked by a running secondary user.
struct ChannelMemory {
  std::optional<Observation> last;
  std::uint64_t age = 0; ///< slots since `last` was observed, minus one
};

/// Everything a policy may look at when choosing the action for one slot.
struct DecisionContext {
  std::span<const double> beliefs;
  std::span<const ChannelMemory> memory;
  int delay = 1;
};

class Policy {
public:
  virtual ~Policy() = default;
  virtual Action decide(const DecisionContext &ctx) const = 0;
  virtual std::string describe() const = 0;
};

/// Wait iff the max belief is <= lambda_star(l) (and the wait region is
/// non-empty); otherwise SenseWait below l_star and SenseFallback from l_star on.
class ThresholdPolicy final : public Policy {
public:
  ThresholdPolicy(std::vector<double> lambda_star, int l_star, int l_max);

  /// lambda*(l) for l = 1..l_max; 0 encodes an empty wait region.
  double lambda_star(int delay) const;
  std::span<const double> thresholds() const { return lambda_star_; }
  int l_star() const { return l_star_; }
  int l_max() const { return l_max_; }
  /// True when no switch delay below l_max was found (the cap binds).
  bool cap_binding() const { return l_star_ >= l_max_; }

  Action act(double belief, int delay) const;
  Action decide(const DecisionContext &ctx) const override;
  std::string describe() const override;

private:
  std::vector<double> lambda_star_;
  int l_star_;
  int l_max_;
};

/// MP-k: always sense; fall back to the dedicated channel once delay reaches k.
class MemorylessPolicy final : public Policy {
public:
  explicit MemorylessPolicy(int k);
  int k() const { return k_; }
  Action decide(const DecisionContext &ctx) const override;
  std::string describe() const override;

private:
  int k_;
};

Action memoryless_act(const MemorylessPolicy &mp, int delay);

/// Exact optimal policy of a multichannel solve, looked up by descriptor.
class DescriptorPolicy final : public Policy {
public:
  explicit DescriptorPolicy(std::shared_ptr<const MultiChannelSolution> solution);
  Action decide(const DecisionContext &ctx) const override;
  std::string describe() const override;
  const MultiChannelSolution &solution() const { return *sol_; }

private:
  std::shared_ptr<const MultiChannelSolution> sol_;
};

/// Smallest l at which the busy branch prefers the dedicated channel:
///   -f(l) + V(beta, l+1) < phi - p_3g + V(beta, 1)
/// (transmission-slot penalty added to the right side under RewardTable).
/// Returns l_max when no earlier delay qualifies.
int dedicated_switch_delay(const ValueFunction &V);

/// Busy-branch margin  -f(l) - phi + p_3g + V(beta,l+1) - V(beta,1)  (+ tx penalty);
/// negative means the dedicated channel is preferred after a busy observation.
double busy_branch_margin(const ValueFunction &V, int delay);

/// Argmax-scan thresholds. Throws NotThreshold if some delay's wait region is
/// not a prefix of the belief grid.
ThresholdPolicy extract_thresholds(const ValueFunction &V);

double th1(const ValueFunction &V, double belief, int delay);
double th2(const ValueFunction &V, double belief, int delay);

/// max(0, min(Th1, Th2)) at a belief, clamped to [0, 1].
double threshold_fixed_point_map(const ValueFunction &V, double belief, int delay);

/// True iff phi >= p_3g, i.e. -f(l) <= phi - p_3g for every l >= 1.
bool never_wait_after_sensing(const RewardParams &r);

struct StructureCheck {
  std::string name;
  enum class Status { Pass, Fail, Skipped } status = Status::Pass;
  double margin = 0.0; ///< worst-case slack; negative on failure
  std::string detail;
};

struct StructureReport {
  std::vector<StructureCheck> checks;
  bool all_passed() const;
  const StructureCheck *find(const std::string &name) const;
  std::string to_text() const;
};

/// Runs every structural predicate on a converged single-channel solve.
StructureReport check_structure(const ValueFunction &V);

/// Multichannel summaries: lambda*(l) over sensed-channel beliefs and l*.
struct MultiChannelThresholds {
  std::vector<double> lambda_star;       ///< per delay, midpoint rule
  std::vector<bool> prefix_consistent;   ///< wait set is a belief prefix at l
  int l_star = 0;
};

/// l* is the smallest delay at which the busy branch prefers the dedicated
/// channel from the post-busy descriptor of the all-unknown start state.
MultiChannelThresholds extract_multichannel_thresholds(const MultiChannelSolution &S);

} // namespace osa
