#include "osa/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "osa/error.hpp"

namespace osa {

// ---------------------------------------------------------------------------
// ThresholdPolicy

ThresholdPolicy::ThresholdPolicy(std::vector<double> lambda_star, int l_star,
                                 int l_max)
    : lambda_star_(std::move(lambda_star)), l_star_(l_star), l_max_(l_max) {
  if (l_max_ < 1 || static_cast<int>(lambda_star_.size()) != l_max_) {
    throw Error(ErrorKind::InvalidArgument,
                "threshold table must have one entry per delay 1..l_max");
  }
  if (l_star_ < 1 || l_star_ > l_max_) {
    throw Error(ErrorKind::InvalidArgument, "l_star must lie in [1, l_max]");
  }
  for (double x : lambda_star_) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "thresholds must lie in [0,1]");
    }
  }
}

double ThresholdPolicy::lambda_star(int delay) const {
  const int l = std::clamp(delay, 1, l_max_);
  return lambda_star_[static_cast<std::size_t>(l - 1)];
}

Action ThresholdPolicy::act(double belief, int delay) const {
  if (delay >= l_max_) {
    return Action::SenseFallback;
  }
  const double thr = lambda_star(delay);
  if (thr > 0.0 && belief <= thr) {
    return Action::Wait;
  }
  return delay < l_star_ ? Action::SenseWait : Action::SenseFallback;
}

Action ThresholdPolicy::decide(const DecisionContext &ctx) const {
  const double b = ctx.beliefs.empty()
                       ? 0.0
                       : *std::max_element(ctx.beliefs.begin(), ctx.beliefs.end());
  return act(b, ctx.delay);
}

std::string ThresholdPolicy::describe() const {
  std::ostringstream os;
  os << "threshold(l_star=" << l_star_ << ", l_max=" << l_max_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// MemorylessPolicy

MemorylessPolicy::MemorylessPolicy(int k) : k_(k) {
  if (k < 1) {
    throw Error(ErrorKind::InvalidArgument, "memoryless attempt limit k must be >= 1");
  }
}

Action memoryless_act(const MemorylessPolicy &mp, int delay) {
  return delay < mp.k() ? Action::SenseWait : Action::SenseFallback;
}

Action MemorylessPolicy::decide(const DecisionContext &ctx) const {
  return memoryless_act(*this, ctx.delay);
}

std::string MemorylessPolicy::describe() const { return "MP-" + std::to_string(k_); }

// ---------------------------------------------------------------------------
// DescriptorPolicy

DescriptorPolicy::DescriptorPolicy(std::shared_ptr<const MultiChannelSolution> solution)
    : sol_(std::move(solution)) {
  if (!sol_) {
    throw Error(ErrorKind::InvalidArgument, "descriptor policy needs a solution");
  }
}

Action DescriptorPolicy::decide(const DecisionContext &ctx) const {
  const auto &states = sol_->states();
  const auto &codec = states.codec();
  const int k = codec.k_trunc();
  if (static_cast<int>(ctx.memory.size()) != states.n_channels()) {
    throw Error(ErrorKind::InvalidArgument,
                "descriptor policy channel count mismatch");
  }
  std::uint8_t codes[8] = {};
  for (std::size_t i = 0; i < ctx.memory.size(); ++i) {
    const auto &m = ctx.memory[i];
    if (!m.last || m.age >= static_cast<std::uint64_t>(k)) {
      codes[i] = 0;
    } else {
      const int base = *m.last == Observation::Idle ? 1 : 1 + k;
      codes[i] = static_cast<std::uint8_t>(base + static_cast<int>(m.age));
    }
  }
  const auto d = states.find({codes, ctx.memory.size()});
  if (d == ReachableStates::kNone) {
    throw Error(ErrorKind::InvalidArgument, "belief descriptor not in the solved state set");
  }
  const int l = std::min(ctx.delay, sol_->l_max());
  return sol_->action(d, l);
}

std::string DescriptorPolicy::describe() const {
  return "multichannel-optimal(N=" + std::to_string(sol_->states().n_channels()) + ")";
}

// ---------------------------------------------------------------------------
// Threshold analysis

namespace {

double tx_penalty(const ValueFunction &V, int delay) {
  return V.convention() == PenaltyConvention::RewardTable
             ? V.rewards().delay_penalty(delay)
             : 0.0;
}

} // namespace

double busy_branch_margin(const ValueFunction &V, int delay) {
  const auto &r = V.rewards();
  const std::size_t b = V.beta_index();
  return -r.delay_penalty(delay) - r.phi + r.p_3g + tx_penalty(V, delay) +
         V.value(b, next_delay(delay, V.l_max())) - V.value(b, 1);
}

int dedicated_switch_delay(const ValueFunction &V) {
  for (int l = 1; l < V.l_max(); ++l) {
    // Ties go to SenseWait, matching the solver's lower-index rule.
    const double margin = busy_branch_margin(V, l);
    const double scale = std::max(1.0, V.rewards().p_3g);
    if (margin < -kTieTolerance * scale) {
      return l;
    }
  }
  return V.l_max();
}

ThresholdPolicy extract_thresholds(const ValueFunction &V) {
  const auto &grid = V.grid();
  const int L = V.l_max();
  std::vector<double> lam(static_cast<std::size_t>(L), 0.0);
  for (int l = 1; l < L; ++l) {
    std::size_t prefix = 0;
    while (prefix < grid.size() && V.action(prefix, l) == Action::Wait) {
      ++prefix;
    }
    for (std::size_t i = prefix; i < grid.size(); ++i) {
      if (V.action(i, l) == Action::Wait) {
        std::ostringstream os;
        os << "wait region is not a belief prefix at delay " << l
           << ": non-wait at belief " << grid[prefix] << " but wait at " << grid[i];
        throw Error(ErrorKind::NotThreshold, os.str());
      }
    }
    double thr;
    if (prefix == 0) {
      thr = 0.0;
    } else if (prefix == grid.size()) {
      thr = 1.0;
    } else {
      thr = 0.5 * (grid[prefix - 1] + grid[prefix]);
    }
    lam[static_cast<std::size_t>(l - 1)] = thr;
  }
  return ThresholdPolicy(std::move(lam), dedicated_switch_delay(V), L);
}

double th1(const ValueFunction &V, double belief, int delay) {
  const auto &r = V.rewards();
  const int ln = next_delay(delay, V.l_max());
  const double v_beta_next = V.value(V.beta_index(), ln);
  const double num = interpolate(V, update_unsensed(V.channel(), belief), ln) -
                     v_beta_next + r.c_s;
  const double den = r.delay_penalty(delay) - tx_penalty(V, delay) + r.phi - r.p_p +
                     V.value(V.alpha_index(), 1) - v_beta_next;
  if (std::abs(den) < 1e-12) {
    throw Error(ErrorKind::DegenerateDenominator, "Th1 denominator vanishes");
  }
  return num / den;
}

double th2(const ValueFunction &V, double belief, int delay) {
  const auto &r = V.rewards();
  const int ln = next_delay(delay, V.l_max());
  const double v_beta1 = V.value(V.beta_index(), 1);
  const double num = interpolate(V, update_unsensed(V.channel(), belief), ln) -
                     v_beta1 + r.c_s - r.delay_penalty(delay) + tx_penalty(V, delay) -
                     r.phi + r.p_3g;
  const double den = -r.p_p + V.value(V.alpha_index(), 1) + r.p_3g - v_beta1;
  if (std::abs(den) < 1e-12) {
    throw Error(ErrorKind::DegenerateDenominator, "Th2 denominator vanishes");
  }
  return num / den;
}

double threshold_fixed_point_map(const ValueFunction &V, double belief, int delay) {
  return std::clamp(std::min(th1(V, belief, delay), th2(V, belief, delay)), 0.0, 1.0);
}

bool never_wait_after_sensing(const RewardParams &r) { return r.phi >= r.p_3g; }

// ---------------------------------------------------------------------------
// Structure report

bool StructureReport::all_passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const StructureCheck &c) {
    return c.status == StructureCheck::Status::Fail;
  });
}

const StructureCheck *StructureReport::find(const std::string &name) const {
  for (const auto &c : checks) {
    if (c.name == name) {
      return &c;
    }
  }
  return nullptr;
}

std::string StructureReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  for (const auto &c : checks) {
    const char *st = c.status == StructureCheck::Status::Pass   ? "pass"
                     : c.status == StructureCheck::Status::Fail ? "fail"
                                                                : "skipped";
    os << "[" << c.name << "]\n"
       << "status = " << st << "\n"
       << "margin = " << c.margin << "\n";
    if (!c.detail.empty()) {
      os << "detail = " << c.detail << "\n";
    }
    os << "\n";
  }
  return os.str();
}

namespace {

constexpr double kMonotoneTol = 1e-8;
constexpr double kConvexTol = 1e-6;

StructureCheck make_check(std::string name, double margin, double tol,
                          std::string detail = {}) {
  StructureCheck c;
  c.name = std::move(name);
  c.margin = margin;
  c.status = margin >= -tol ? StructureCheck::Status::Pass : StructureCheck::Status::Fail;
  c.detail = std::move(detail);
  return c;
}

StructureCheck skipped(std::string name, std::string why) {
  StructureCheck c;
  c.name = std::move(name);
  c.status = StructureCheck::Status::Skipped;
  c.detail = std::move(why);
  return c;
}

} // namespace

StructureReport check_structure(const ValueFunction &V) {
  StructureReport rep;
  const auto &grid = V.grid();
  const auto &r = V.rewards();
  const int L = V.l_max();
  const std::size_t n = grid.size();
  const bool ordered = V.channel().positively_correlated();
  const std::string gate = "requires alpha >= beta";

  {
    double worst = std::numeric_limits<double>::infinity();
    std::string where;
    for (std::size_t i = 0; i < n; ++i) {
      for (int l = 1; l < L; ++l) {
        const double m = V.value(i, l) - V.value(i, l + 1);
        if (m < worst) {
          worst = m;
          where = "belief " + std::to_string(grid[i]) + ", delay " + std::to_string(l);
        }
      }
    }
    rep.checks.push_back(make_check("monotone_in_delay", worst, kMonotoneTol, where));
  }

  if (ordered) {
    double worst = std::numeric_limits<double>::infinity();
    std::string where;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (int l = 1; l <= L; ++l) {
        const double m = V.value(i + 1, l) - V.value(i, l);
        if (m < worst) {
          worst = m;
          where = "belief " + std::to_string(grid[i]) + ", delay " + std::to_string(l);
        }
      }
    }
    rep.checks.push_back(make_check("monotone_in_belief", worst, kMonotoneTol, where));
  } else {
    rep.checks.push_back(skipped("monotone_in_belief", gate));
  }

  {
    // Gap between the chord through the neighbours and the middle value; on a
    // uniform grid this is half the second difference.
    double worst = std::numeric_limits<double>::infinity();
    std::string where;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = grid[i] - grid[i - 1];
      const double h1 = grid[i + 1] - grid[i];
      for (int l = 1; l <= L; ++l) {
        const double chord = (h1 * V.value(i - 1, l) + h0 * V.value(i + 1, l)) / (h0 + h1);
        const double m = chord - V.value(i, l);
        if (m < worst) {
          worst = m;
          where = "belief " + std::to_string(grid[i]) + ", delay " + std::to_string(l);
        }
      }
    }
    rep.checks.push_back(make_check("convex_in_belief", worst, kConvexTol, where));
  }

  if (ordered) {
    // Margin: max over wait states above pi(0) of -(Q0 - max(Q1,Q2)).
    double worst = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    std::string where;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(grid[i] > V.pi0())) {
        continue;
      }
      for (int l = 1; l < L; ++l) {
        double q[3];
        q_values(V, grid[i], l, q);
        const double m = std::max(q[1], q[2]) - q[0];
        if (V.action(i, l) == Action::Wait) {
          ++violations;
        }
        if (m < worst) {
          worst = m;
          where = "belief " + std::to_string(grid[i]) + ", delay " + std::to_string(l);
        }
      }
    }
    auto c = make_check("no_wait_above_pi0", worst, 0.0,
                        std::to_string(violations) + " wait states above pi(0); worst at " + where);
    c.status = violations == 0 ? StructureCheck::Status::Pass : StructureCheck::Status::Fail;
    rep.checks.push_back(c);
  } else {
    rep.checks.push_back(skipped("no_wait_above_pi0", gate));
  }

  {
    const double m = (-r.p_p + V.value(V.alpha_index(), 1)) -
                     (-r.p_3g + V.value(V.beta_index(), 1));
    rep.checks.push_back(make_check("primary_beats_dedicated", m, 0.0));
  }

  {
    const int ls = dedicated_switch_delay(V);
    double worst = std::numeric_limits<double>::infinity();
    int at = 1;
    for (int l = 1; l <= ls; ++l) {
      const double m = V.gain() + r.delay_penalty(l);
      if (m < worst) {
        worst = m;
        at = l;
      }
    }
    auto c = make_check("gain_exceeds_penalty", worst, 0.0,
                        "g_u = " + std::to_string(V.gain()) + ", tightest at delay " +
                            std::to_string(at));
    // Strict inequality.
    c.status = worst > 0.0 ? StructureCheck::Status::Pass : StructureCheck::Status::Fail;
    rep.checks.push_back(c);
  }

  if (ordered) {
    std::size_t bad = 0;
    std::string where;
    for (int l = 1; l < L; ++l) {
      bool left = false;
      for (std::size_t i = 0; i < n; ++i) {
        const bool wait = V.action(i, l) == Action::Wait;
        if (!wait) {
          left = true;
        } else if (left) {
          ++bad;
          if (where.empty()) {
            where = "delay " + std::to_string(l) + ", belief " + std::to_string(grid[i]);
          }
          break;
        }
      }
    }
    StructureCheck c;
    c.name = "wait_region_prefix";
    c.margin = -static_cast<double>(bad);
    c.status = bad == 0 ? StructureCheck::Status::Pass : StructureCheck::Status::Fail;
    c.detail = bad == 0 ? "" : std::to_string(bad) + " delays violate; first at " + where;
    rep.checks.push_back(c);
  } else {
    rep.checks.push_back(skipped("wait_region_prefix", gate));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Multichannel summaries

MultiChannelThresholds extract_multichannel_thresholds(const MultiChannelSolution &S) {
  const auto &states = S.states();
  const auto &r = S.rewards();
  const int L = S.l_max();
  MultiChannelThresholds out;
  out.lambda_star.assign(static_cast<std::size_t>(L), 0.0);
  out.prefix_consistent.assign(static_cast<std::size_t>(L), true);

  for (int l = 1; l < L; ++l) {
    double max_wait = -1.0;
    for (std::size_t d = 0; d < states.size(); ++d) {
      if (S.action(d, l) == Action::Wait) {
        max_wait = std::max(max_wait, states.sensed_belief(d));
      }
    }
    if (max_wait < 0.0) {
      continue;
    }
    double next_sense = 2.0;
    double min_sense = 2.0;
    for (std::size_t d = 0; d < states.size(); ++d) {
      if (S.action(d, l) != Action::Wait) {
        const double b = states.sensed_belief(d);
        min_sense = std::min(min_sense, b);
        if (b > max_wait) {
          next_sense = std::min(next_sense, b);
        }
      }
    }
    out.lambda_star[static_cast<std::size_t>(l - 1)] =
        next_sense > 1.0 ? 1.0 : 0.5 * (max_wait + next_sense);
    out.prefix_consistent[static_cast<std::size_t>(l - 1)] = !(min_sense <= max_wait);
  }

  const auto busy = states.after_busy(ReachableStates::start());
  out.l_star = L;
  for (int l = 1; l < L; ++l) {
    const double e =
        S.convention() == PenaltyConvention::RewardTable ? r.delay_penalty(l) : 0.0;
    const double margin = -r.delay_penalty(l) - r.phi + r.p_3g + e +
                          S.value(busy, l + 1) - S.value(busy, 1);
    if (margin < -kTieTolerance * std::max(1.0, r.p_3g)) {
      out.l_star = l;
      break;
    }
  }
  return out;
}

} // namespace osa
