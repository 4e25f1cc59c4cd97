#include "osa/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "osa/error.hpp"

namespace osa {

std::string_view to_string(Action a) {
  switch (a) {
  case Action::Wait:
    return "wait";
  case Action::SenseWait:
    return "sense_wait";
  case Action::SenseFallback:
    return "sense_fallback";
  }
  return "?";
}

std::size_t best_action_index(const double (&q)[3]) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < 3; ++a) {
    if (!std::isfinite(q[best])) {
      // inadmissible actions carry -inf and lose to anything finite
      if (q[a] > q[best]) {
        best = a;
      }
      continue;
    }
    const double scale = std::max({1.0, std::abs(q[a]), std::abs(q[best])});
    if (q[a] > q[best] + kTieTolerance * scale) {
      best = a;
    }
  }
  return best;
}

ValueFunction::ValueFunction(ChannelParams channel, RewardParams rewards,
                             BeliefGrid grid, int l_max,
                             PenaltyConvention convention)
    : channel_(channel), rewards_(rewards), grid_(std::move(grid)),
      l_max_(l_max), convention_(convention) {
  if (l_max_ < 1) {
    throw Error(ErrorKind::InvalidArgument, "l_max must be >= 1");
  }
  pi0_ = stationary_idle(channel_);
  alpha_index_ = grid_.index_of(channel_.alpha);
  beta_index_ = grid_.index_of(channel_.beta);
  reference_index_ = grid_.nearest(pi0_);
  const std::size_t n = grid_.size() * static_cast<std::size_t>(l_max_);
  v_.assign(n, 0.0);
  actions_.assign(n, Action::Wait);
}

double interpolate(const ValueFunction &V, double belief, int delay) {
  const auto b = V.grid().locate(belief);
  if (b.weight == 0.0) {
    return V.value(b.lo, delay);
  }
  if (b.weight == 1.0) {
    return V.value(b.lo + 1, delay);
  }
  return (1.0 - b.weight) * V.value(b.lo, delay) +
         b.weight * V.value(b.lo + 1, delay);
}

namespace {

/// Penalty charged on transmission slots under the selected convention.
double transmit_penalty(const ValueFunction &V, int delay) {
  return V.convention() == PenaltyConvention::RewardTable
             ? V.rewards().delay_penalty(delay)
             : 0.0;
}

} // namespace

double q_wait(const ValueFunction &V, double belief, int delay) {
  const double next = update_unsensed(V.channel(), belief);
  return -V.rewards().delay_penalty(delay) +
         interpolate(V, next, next_delay(delay, V.l_max()));
}

double q_sense_wait(const ValueFunction &V, double belief, int delay) {
  const auto &r = V.rewards();
  const double f = r.delay_penalty(delay);
  const double success =
      r.phi - r.p_p - transmit_penalty(V, delay) + V.value(V.alpha_index(), 1);
  const double failure =
      -f + V.value(V.beta_index(), next_delay(delay, V.l_max()));
  return -r.c_s + belief * success + (1.0 - belief) * failure;
}

double q_sense_fallback(const ValueFunction &V, double belief, int delay) {
  const auto &r = V.rewards();
  const double success = -r.p_p + V.value(V.alpha_index(), 1);
  const double failure = -r.p_3g + V.value(V.beta_index(), 1);
  return r.phi - r.c_s - transmit_penalty(V, delay) + belief * success +
         (1.0 - belief) * failure;
}

void q_values(const ValueFunction &V, double belief, int delay, double (&q)[3]) {
  constexpr double kInadmissible = -std::numeric_limits<double>::infinity();
  q[2] = q_sense_fallback(V, belief, delay);
  if (delay >= V.l_max()) {
    q[0] = kInadmissible;
    q[1] = kInadmissible;
    return;
  }
  q[0] = q_wait(V, belief, delay);
  q[1] = q_sense_wait(V, belief, delay);
}

namespace {

/// Precomputed geometry for sweeping Bellman backups over the grid.
struct BackupKernel {
  explicit BackupKernel(const ValueFunction &V) {
    const auto &grid = V.grid();
    const int l_max = V.l_max();
    const auto &r = V.rewards();
    omega.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      omega.push_back(grid.locate(update_unsensed(V.channel(), grid[i])));
    }
    penalty.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
    tx_penalty.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
    for (int l = 1; l <= l_max; ++l) {
      penalty[l] = r.delay_penalty(l);
      tx_penalty[l] = V.convention() == PenaltyConvention::RewardTable ? penalty[l] : 0.0;
    }
  }

  /// Writes max_a Q_a into out (raw, not normalized) and the argmax into acts.
  void apply(const ValueFunction &V, std::vector<double> &out,
             std::vector<Action> &acts) const {
    const auto &grid = V.grid();
    const auto &r = V.rewards();
    const auto &v = V.table();
    const int l_max = V.l_max();
    const auto L = static_cast<std::size_t>(l_max);
    const double v_alpha1 = v[V.alpha_index() * L];
    const double v_beta1 = v[V.beta_index() * L];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double lam = grid[i];
      const auto &om = omega[i];
      const double *lo_row = &v[om.lo * L];
      const double *hi_row = &v[(om.lo + 1) * L];
      const double *beta_row = &v[V.beta_index() * L];
      for (int l = 1; l <= l_max; ++l) {
        const std::size_t k = i * L + static_cast<std::size_t>(l - 1);
        const double e = tx_penalty[l];
        const double q2 = r.phi - r.c_s - e + lam * (-r.p_p + v_alpha1) +
                          (1.0 - lam) * (-r.p_3g + v_beta1);
        if (l == l_max) {
          out[k] = q2;
          acts[k] = Action::SenseFallback;
          continue;
        }
        const std::size_t ln = static_cast<std::size_t>(l); // index of delay l+1
        const double cont = om.weight == 0.0 ? lo_row[ln]
                            : om.weight == 1.0
                                ? hi_row[ln]
                                : (1.0 - om.weight) * lo_row[ln] + om.weight * hi_row[ln];
        const double q[3] = {
            -penalty[l] + cont,
            -r.c_s + lam * (r.phi - r.p_p - e + v_alpha1) +
                (1.0 - lam) * (-penalty[l] + beta_row[ln]),
            q2};
        const std::size_t a = best_action_index(q);
        out[k] = q[a];
        acts[k] = static_cast<Action>(a);
      }
    }
  }

  std::vector<BeliefGrid::Bracket> omega;
  std::vector<double> penalty;
  std::vector<double> tx_penalty;
};

void check_solver_inputs(const ChannelParams &p, const RewardParams &r,
                         const SolverOptions &opts) {
  p.validate();
  r.validate();
  if (p.degenerate()) {
    throw Error(ErrorKind::DegenerateChain,
                "solver needs 0 < pi(0) < 1 (alpha=" + std::to_string(p.alpha) +
                    ", beta=" + std::to_string(p.beta) + ")");
  }
  if (!(opts.tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tol must be > 0");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "damping must lie in (0,1]");
  }
  if (opts.l_max < 2) {
    throw Error(ErrorKind::InvalidArgument, "l_max must be >= 2");
  }
}

} // namespace

BackupResult bellman_backup(const ValueFunction &V) {
  BackupKernel kernel(V);
  BackupResult out;
  out.values.assign(V.table().size(), 0.0);
  out.actions.assign(V.table().size(), Action::Wait);
  kernel.apply(V, out.values, out.actions);
  out.gain = out.values[V.reference_index() * static_cast<std::size_t>(V.l_max())];
  for (double &x : out.values) {
    x -= out.gain;
  }
  return out;
}

ValueFunction solve_single_channel(const ChannelParams &p, const RewardParams &r,
                                   const SolverOptions &opts) {
  check_solver_inputs(p, r, opts);
  return solve_single_channel(p, r, BeliefGrid::for_channel(p, opts.grid_intervals),
                              opts);
}

ValueFunction solve_single_channel(const ChannelParams &p, const RewardParams &r,
                                   BeliefGrid grid, const SolverOptions &opts) {
  check_solver_inputs(p, r, opts);
  ValueFunction V(p, r, std::move(grid), opts.l_max, opts.convention);
  BackupKernel kernel(V);
  auto &v = V.table();
  std::vector<double> tv(v.size());
  std::vector<Action> acts(v.size());
  const std::size_t ref = V.reference_index() * static_cast<std::size_t>(opts.l_max);
  const double tau = opts.damping;

  double span = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iter; ++it) {
    kernel.apply(V, tv, acts);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double d = tv[k] - v[k];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    span = hi - lo;
    // V(ref) = 0, so T(V)(ref) estimates the gain.
    const double gain = tv[ref] - v[ref];
    const double shift = (1.0 - tau) * v[ref] + tau * tv[ref];
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = (1.0 - tau) * v[k] + tau * tv[k] - shift;
    }
    if (!std::isfinite(span)) {
      break;
    }
    if (span <= opts.tol) {
      V.set_gain(gain);
      V.iterations = it;
      V.final_span = span;
      for (std::size_t i = 0; i < V.grid().size(); ++i) {
        for (int l = 1; l <= opts.l_max; ++l) {
          V.set_action(i, l, acts[i * static_cast<std::size_t>(opts.l_max) + (l - 1)]);
        }
      }
      return V;
    }
  }
  throw Error(ErrorKind::NoConvergence,
              "relative value iteration did not converge in " +
                  std::to_string(opts.max_iter) +
                  " iterations (final span " + std::to_string(span) + ")");
}

} // namespace osa
