#include "osa/channel.hpp"

#include <cmath>
#include <string>

#include "osa/error.hpp"

namespace osa {

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

} // namespace

void ChannelParams::validate() const {
  if (!is_probability(alpha) || !is_probability(beta)) {
    throw Error(ErrorKind::InvalidArgument,
                "channel transition probabilities must lie in [0,1] (alpha=" +
                    std::to_string(alpha) + ", beta=" + std::to_string(beta) +
                    ")");
  }
}

bool ChannelParams::degenerate() const {
  const double denom = 1.0 - alpha + beta;
  if (denom <= 0.0) {
    return true;
  }
  const double pi0 = beta / denom;
  return pi0 <= 0.0 || pi0 >= 1.0;
}

double stationary_idle(const ChannelParams &p) {
  const double denom = 1.0 - p.alpha + p.beta;
  if (denom == 0.0) {
    throw Error(ErrorKind::DegenerateChain,
                "stationary idle probability undefined for alpha=1, beta=0");
  }
  return p.beta / denom;
}

double iterate_unsensed(const ChannelParams &p, double b0, std::uint64_t k) {
  if (k == 0) {
    return b0;
  }
  const double rate = p.alpha - p.beta;
  if (1.0 - rate == 0.0) {
    // alpha = 1, beta = 0: every belief is a fixed point.
    return b0;
  }
  const double pi0 = p.beta / (1.0 - rate);
  return pi0 + std::pow(rate, static_cast<double>(k)) * (b0 - pi0);
}

ChannelState step_true_state(const ChannelParams &p, ChannelState s, Rng &rng) {
  const double p_idle = s == ChannelState::Idle ? p.alpha : p.beta;
  return rng.bernoulli(p_idle) ? ChannelState::Idle : ChannelState::Busy;
}

ChannelState sample_stationary(const ChannelParams &p, Rng &rng) {
  const double denom = 1.0 - p.alpha + p.beta;
  const double pi0 = denom == 0.0 ? 1.0 : p.beta / denom;
  return rng.bernoulli(pi0) ? ChannelState::Idle : ChannelState::Busy;
}

} // namespace osa
