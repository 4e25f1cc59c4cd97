#include "osa/learn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osa/error.hpp"
#include "osa/rng.hpp"
#include "osa/sim.hpp"

namespace osa {

ChannelCounts CountingStats::pooled() const {
  ChannelCounts sum;
  for (const auto &c : counts_) {
    sum.k += c.k;
    sum.i += c.i;
    sum.m += c.m;
  }
  return sum;
}

void update_counts(CountingStats &stats, std::size_t channel, bool prev_sensed_idle,
                   Observation obs) {
  auto &c = stats.channel(channel);
  ++c.m;
  if (obs == Observation::Idle) {
    ++c.i;
    if (prev_sensed_idle) {
      ++c.k;
    }
  }
}

void SensingRecorder::observe(std::size_t channel, Observation obs) {
  update_counts(stats_, channel, idle_prev_.at(channel), obs);
  idle_now_[channel] = obs == Observation::Idle;
}

void SensingRecorder::end_slot() {
  idle_prev_.swap(idle_now_);
  std::fill(idle_now_.begin(), idle_now_.end(), false);
}

Estimates estimate(const ChannelCounts &c) {
  if (c.i == 0 || c.m == 0) {
    throw Error(ErrorKind::InsufficientData,
                "need at least one idle observation (I=" + std::to_string(c.i) +
                    ", M=" + std::to_string(c.m) + ")");
  }
  Estimates e;
  e.alpha = static_cast<double>(c.k) / static_cast<double>(c.i);
  e.pi0 = static_cast<double>(c.i) / static_cast<double>(c.m);
  if (c.i == c.m) {
    e.beta_defined = false;
    e.beta = 1.0;
    return e;
  }
  e.beta = std::clamp((1.0 - e.alpha) * e.pi0 / (1.0 - e.pi0), 0.0, 1.0);
  return e;
}

Estimates estimate(const CountingStats &stats, std::size_t channel) {
  return estimate(stats.channel(channel));
}

int discretize(double value, int m) {
  if (m < 1) {
    throw Error(ErrorKind::InvalidArgument, "m must be >= 1");
  }
  const int k = static_cast<int>(std::floor(std::clamp(value, 0.0, 1.0) * m));
  return std::min(k, m - 1);
}

BinPair discretize(const Estimates &est, int m) {
  return {discretize(est.alpha, m), discretize(est.beta, m)};
}

CountingStats sense_continuously(const ChannelParams &p, std::uint64_t slots,
                                 std::uint64_t seed) {
  p.validate();
  Rng rng(seed, 0x100);
  SensingRecorder rec(1);
  ChannelState s = sample_stationary(p, rng);
  for (std::uint64_t t = 0; t < slots; ++t) {
    rec.observe(0, s == ChannelState::Idle ? Observation::Idle : Observation::Busy);
    rec.end_slot();
    s = step_true_state(p, s, rng);
  }
  return rec.stats();
}

double CandidateSet::level(std::size_t id) const {
  return levels.at(id / static_cast<std::size_t>(max_switch_delay));
}

int CandidateSet::switch_delay(std::size_t id) const {
  return static_cast<int>(id % static_cast<std::size_t>(max_switch_delay)) + 1;
}

ThresholdPolicy CandidateSet::make(std::size_t id, int l_max) const {
  if (id >= size()) {
    throw Error(ErrorKind::InvalidArgument, "candidate id out of range");
  }
  std::vector<double> thr(static_cast<std::size_t>(l_max), level(id));
  thr.back() = 0.0;
  return ThresholdPolicy(std::move(thr), std::min(switch_delay(id), l_max), l_max);
}

void LearnerConfig::validate() const {
  if (m < 1) {
    throw Error(ErrorKind::InvalidArgument, "m must be >= 1");
  }
  if (nbslot < 1) {
    throw Error(ErrorKind::InvalidArgument, "nbslot must be >= 1");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must be in [0,1]");
  }
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "eta must be in [0,1)");
  }
  if (!rho) {
    throw Error(ErrorKind::InvalidArgument, "rho schedule is empty");
  }
  if (candidates.levels.empty() || candidates.max_switch_delay < 1) {
    throw Error(ErrorKind::InvalidArgument, "candidate policy set is empty");
  }
  for (double v : candidates.levels) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "candidate threshold levels must be in [0,1]");
    }
  }
  if (l_max < 1) {
    throw Error(ErrorKind::InvalidArgument, "l_max must be >= 1");
  }
  if (!(initial_alpha >= 0.0 && initial_alpha <= 1.0 && initial_beta >= 0.0 &&
        initial_beta <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "initial estimates must be in [0,1]");
  }
}

QTable::QTable(int m, std::size_t n_policies)
    : m_(m), n_(n_policies), q_(static_cast<std::size_t>(m) * m * n_policies, 0.0) {
  if (m < 1 || n_policies == 0) {
    throw Error(ErrorKind::InvalidArgument, "QTable needs m >= 1 and a non-empty policy set");
  }
}

std::size_t QTable::offset(BinPair b, std::size_t policy) const {
  if (b.alpha < 0 || b.alpha >= m_ || b.beta < 0 || b.beta >= m_ || policy >= n_) {
    throw Error(ErrorKind::InvalidArgument, "QTable index out of range");
  }
  return (static_cast<std::size_t>(b.alpha) * m_ + b.beta) * n_ + policy;
}

double &QTable::at(BinPair b, std::size_t policy) { return q_[offset(b, policy)]; }
double QTable::at(BinPair b, std::size_t policy) const { return q_[offset(b, policy)]; }

std::size_t QTable::greedy(BinPair b) const {
  const std::size_t base = offset(b, 0);
  std::size_t best = 0;
  for (std::size_t j = 1; j < n_; ++j) {
    if (q_[base + j] > q_[base + best]) {
      best = j;
    }
  }
  return best;
}

LearningResult run_learning(const LearnerConfig &cfg, const std::vector<ChannelParams> &channels,
                            const RewardParams &rewards, std::uint64_t iterations,
                            std::uint64_t seed) {
  cfg.validate();
  SimConfig sim;
  sim.seed = seed;
  sim.channels = channels;
  sim.rewards = rewards;
  sim.l_max = cfg.l_max;
  sim.convention = cfg.convention;
  Episode episode(sim);

  const std::size_t n_policies = cfg.candidates.size();
  std::vector<ThresholdPolicy> policies;
  policies.reserve(n_policies);
  for (std::size_t id = 0; id < n_policies; ++id) {
    policies.push_back(cfg.candidates.make(id, cfg.l_max));
  }

  Rng explore(seed, 0x200);
  Rng init(seed, 0x300);
  QTable q(cfg.m, n_policies);
  SensingRecorder recorder(channels.size());

  Estimates est;
  est.alpha = cfg.initial_alpha;
  est.beta = cfg.initial_beta;
  BinPair bins = discretize(est, cfg.m);
  std::size_t current = init.below(n_policies);

  std::vector<LearnTraceRow> trace;
  trace.reserve(iterations);
  for (std::uint64_t k = 1; k <= iterations; ++k) {
    const std::size_t prev_policy = current;
    const BinPair prev_bins = bins;

    // The channels are i.i.d., so counters are pooled into one estimate.
    try {
      const Estimates fresh = estimate(recorder.stats().pooled());
      est.alpha = fresh.alpha;
      est.pi0 = fresh.pi0;
      if (fresh.beta_defined) {
        est.beta = fresh.beta;
      }
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::InsufficientData) {
        throw;
      }
    }
    bins = discretize(est, cfg.m);

    const bool exploring = explore.bernoulli(cfg.epsilon);
    current = exploring ? explore.below(n_policies) : q.greedy(bins);

    double reward = 0.0;
    for (int n = 0; n < cfg.nbslot; ++n) {
      const SlotOutcome out = episode.step(policies[current]);
      if (out.observation) {
        recorder.observe(out.sensed_channel, *out.observation);
      }
      recorder.end_slot();
      reward += out.reward;
    }

    const double rho = cfg.rho(k);
    const double target = reward + cfg.eta * q.at(bins, current);
    double &cell = q.at(prev_bins, prev_policy);
    if (cfg.weighting == QWeighting::AsPrinted) {
      cell = rho * cell + (1.0 - rho) * target;
    } else {
      cell = (1.0 - rho) * cell + rho * target;
    }
    trace.push_back({k, est.alpha, est.beta, current, reward, cell, exploring});
  }

  const std::size_t best = q.greedy(bins);
  return LearningResult{std::move(q),
                        std::move(trace),
                        recorder.stats(),
                        est,
                        bins,
                        best,
                        cfg.candidates.make(best, cfg.l_max)};
}

} // namespace osa
