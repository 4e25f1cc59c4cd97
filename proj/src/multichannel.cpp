#include "osa/multichannel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "osa/error.hpp"

namespace osa {

ChannelMemoryCodec::ChannelMemoryCodec(ChannelParams p, int k_trunc)
    : p_(p), k_trunc_(k_trunc) {
  if (k_trunc < 1 || k_trunc > 127) {
    throw Error(ErrorKind::InvalidArgument, "k_trunc must lie in [1,127]");
  }
  beliefs_.resize(static_cast<std::size_t>(code_count()));
  beliefs_[0] = stationary_idle(p_);
  for (int age = 0; age < k_trunc_; ++age) {
    const auto a = static_cast<std::uint64_t>(age);
    beliefs_[static_cast<std::size_t>(1 + age)] = iterate_unsensed(p_, p_.alpha, a);
    beliefs_[static_cast<std::size_t>(1 + k_trunc_ + age)] =
        iterate_unsensed(p_, p_.beta, a);
  }
}

std::uint8_t ChannelMemoryCodec::fresh(Observation obs) const {
  return static_cast<std::uint8_t>(obs == Observation::Idle ? 1 : 1 + k_trunc_);
}

std::uint8_t ChannelMemoryCodec::aged(std::uint8_t code) const {
  if (code == 0) {
    return 0;
  }
  const int base = code <= k_trunc_ ? 1 : 1 + k_trunc_;
  const int age = code - base + 1;
  return age >= k_trunc_ ? std::uint8_t{0} : static_cast<std::uint8_t>(base + age);
}

std::size_t max_belief_index(std::span<const double> beliefs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < beliefs.size(); ++i) {
    if (beliefs[i] > beliefs[best]) {
      best = i;
    }
  }
  return best;
}

std::uint64_t ReachableStates::key(std::span<const std::uint8_t> sorted) const {
  std::uint64_t k = 0;
  for (std::uint8_t c : sorted) {
    k = (k << 8) | c;
  }
  return k;
}

std::span<const std::uint8_t> ReachableStates::codes(std::size_t d) const {
  const auto n = static_cast<std::size_t>(n_channels_);
  return {codes_.data() + d * n, n};
}

std::uint32_t ReachableStates::find(std::span<const std::uint8_t> codes) const {
  std::vector<std::uint8_t> sorted(codes.begin(), codes.end());
  std::sort(sorted.begin(), sorted.end());
  auto it = index_.find(key(sorted));
  return it == index_.end() ? kNone : it->second;
}

ReachableStates::ReachableStates(const ChannelParams &p, int n_channels,
                                 int k_trunc, std::size_t max_descriptors)
    : codec_(p, k_trunc), n_channels_(n_channels) {
  if (n_channels < 1 || n_channels > 8) {
    throw Error(ErrorKind::InvalidArgument, "n_channels must lie in [1,8]");
  }
  const auto n = static_cast<std::size_t>(n_channels);

  auto intern = [&](std::vector<std::uint8_t> &c) -> std::uint32_t {
    std::sort(c.begin(), c.end());
    const std::uint64_t k = key(c);
    auto [it, inserted] = index_.try_emplace(k, static_cast<std::uint32_t>(index_.size()));
    if (inserted) {
      if (index_.size() > max_descriptors) {
        throw Error(ErrorKind::StateSpaceTooLarge,
                    "reachable descriptor set exceeds " +
                        std::to_string(max_descriptors) + " entries");
      }
      codes_.insert(codes_.end(), c.begin(), c.end());
    }
    return it->second;
  };

  std::vector<std::uint8_t> work(n, 0);
  intern(work);
  std::vector<double> beliefs(n);
  std::vector<std::uint8_t> aged(n);
  for (std::size_t d = 0; d < index_.size(); ++d) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t c = codes_[d * n + i];
      beliefs[i] = codec_.belief(c);
      aged[i] = codec_.aged(c);
    }
    const std::size_t s = max_belief_index(beliefs);
    sensed_.push_back(static_cast<std::uint32_t>(s));

    work = aged;
    wait_.push_back(intern(work));
    work = aged;
    work[s] = codec_.fresh(Observation::Idle);
    idle_.push_back(intern(work));
    work = aged;
    work[s] = codec_.fresh(Observation::Busy);
    busy_.push_back(intern(work));
  }
}

ReachableStates build_reachable_states(const ChannelParams &p, int n_channels,
                                       int k_trunc, int l_max,
                                       std::size_t max_states) {
  p.validate();
  if (l_max < 2) {
    throw Error(ErrorKind::InvalidArgument, "l_max must be >= 2");
  }
  const std::size_t per_delay = std::max<std::size_t>(1, max_states / static_cast<std::size_t>(l_max));
  return ReachableStates(p, n_channels, k_trunc, per_delay);
}

MultiChannelSolution::MultiChannelSolution(ChannelParams channel,
                                           RewardParams rewards,
                                           ReachableStates states, int l_max,
                                           PenaltyConvention convention)
    : channel_(channel), rewards_(rewards), states_(std::move(states)),
      l_max_(l_max), convention_(convention) {
  const std::size_t n = states_.size() * static_cast<std::size_t>(l_max_);
  v_.assign(n, 0.0);
  actions_.assign(n, Action::Wait);
}

namespace {

struct MultiKernel {
  const ReachableStates &S;
  const RewardParams &r;
  int l_max;
  std::vector<double> penalty;
  std::vector<double> tx_penalty;

  MultiKernel(const ReachableStates &states, const RewardParams &rewards, int lmax,
              PenaltyConvention conv)
      : S(states), r(rewards), l_max(lmax) {
    penalty.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
    tx_penalty.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
    for (int l = 1; l <= l_max; ++l) {
      penalty[l] = r.delay_penalty(l);
      tx_penalty[l] = conv == PenaltyConvention::RewardTable ? penalty[l] : 0.0;
    }
  }

  void q_at(const std::vector<double> &v, std::size_t d, int l, double (&q)[3]) const {
    const auto L = static_cast<std::size_t>(l_max);
    const double lam = S.sensed_belief(d);
    const double *idle_row = &v[S.after_idle(d) * L];
    const double *busy_row = &v[S.after_busy(d) * L];
    const double e = tx_penalty[l];
    q[2] = r.phi - r.c_s - e + lam * (-r.p_p + idle_row[0]) +
           (1.0 - lam) * (-r.p_3g + busy_row[0]);
    if (l >= l_max) {
      q[0] = q[1] = -std::numeric_limits<double>::infinity();
      return;
    }
    const auto ln = static_cast<std::size_t>(l); // index of delay l+1
    q[0] = -penalty[l] + v[S.after_wait(d) * L + ln];
    q[1] = -r.c_s + lam * (r.phi - r.p_p - e + idle_row[0]) +
           (1.0 - lam) * (-penalty[l] + busy_row[ln]);
  }

  void apply(const std::vector<double> &v, std::vector<double> &out,
             std::vector<Action> &acts) const {
    const auto L = static_cast<std::size_t>(l_max);
    double q[3];
    for (std::size_t d = 0; d < S.size(); ++d) {
      for (int l = 1; l <= l_max; ++l) {
        q_at(v, d, l, q);
        const std::size_t a = l >= l_max ? 2 : best_action_index(q);
        out[d * L + static_cast<std::size_t>(l - 1)] = q[a];
        acts[d * L + static_cast<std::size_t>(l - 1)] = static_cast<Action>(a);
      }
    }
  }
};

} // namespace

void MultiChannelSolution::q_values(std::size_t d, int delay, double (&q)[3]) const {
  MultiKernel k(states_, rewards_, l_max_, convention_);
  k.q_at(v_, d, delay, q);
}

MultiChannelSolution solve_multichannel(const ChannelParams &p, const RewardParams &r,
                                        const MultiChannelOptions &opts) {
  p.validate();
  r.validate();
  if (p.degenerate()) {
    throw Error(ErrorKind::DegenerateChain, "solver needs 0 < pi(0) < 1");
  }
  if (!(opts.tol > 0.0) || !(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "tol must be > 0 and damping in (0,1]");
  }
  MultiChannelSolution sol(
      p, r,
      build_reachable_states(p, opts.n_channels, opts.k_trunc, opts.l_max, opts.max_states),
      opts.l_max, opts.convention);
  MultiKernel kernel(sol.states(), r, opts.l_max, opts.convention);

  auto &v = sol.table();
  std::vector<double> tv(v.size());
  auto &acts = sol.action_table();
  const std::size_t ref = ReachableStates::start() * static_cast<std::size_t>(opts.l_max);
  const double tau = opts.damping;
  double span = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iter; ++it) {
    kernel.apply(v, tv, acts);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double d = tv[k] - v[k];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    span = hi - lo;
    const double gain = tv[ref] - v[ref];
    const double shift = (1.0 - tau) * v[ref] + tau * tv[ref];
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = (1.0 - tau) * v[k] + tau * tv[k] - shift;
    }
    if (!std::isfinite(span)) {
      break;
    }
    if (span <= opts.tol) {
      sol.set_gain(gain);
      sol.iterations = it;
      sol.final_span = span;
      return sol;
    }
  }
  throw Error(ErrorKind::NoConvergence,
              "multichannel value iteration did not converge in " +
                  std::to_string(opts.max_iter) + " iterations (final span " +
                  std::to_string(span) + ")");
}

} // namespace osa
