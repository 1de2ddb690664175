#include "oppbandit/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace oppbandit {

ChannelParams::ChannelParams(double p01, double p11) : p01_(p01), p11_(p11) {
  if (!(p01 >= 0.0 && p01 <= 1.0) || !(p11 >= 0.0 && p11 <= 1.0))
    throw std::invalid_argument("ChannelParams: probabilities must lie in [0, 1]");
  if (p01 == 0.0 && p11 == 1.0)
    throw std::invalid_argument("ChannelParams: frozen chain (p01 = 0 and p10 = 0)");
  omega_o_ = p01_ / (p01_ + (1.0 - p11_));
  corr_ = p11_ > p01_   ? Correlation::Positive
          : p11_ < p01_ ? Correlation::Negative
                        : Correlation::Zero;
}

double ChannelParams::transition(int from, int to) const {
  const double to_good = from == 1 ? p11_ : p01_;
  return to == 1 ? to_good : 1.0 - to_good;
}

double tau(double omega, const ChannelParams& params) {
  return params.p01() + omega * (params.p11() - params.p01());
}

Belief update_belief(const Belief& omega, int action, int observed,
                     const ChannelParams& params) {
  if (action < 0 || action >= static_cast<int>(omega.size()))
    throw std::out_of_range("update_belief: action out of range");
  Belief next(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i)
    next[i] = tau(omega[i], params);
  next[action] = observed == 1 ? params.p11() : params.p01();
  return next;
}

double j_step_prob(int from, int j, const ChannelParams& params) {
  if (j < 1) throw std::invalid_argument("j_step_prob: j must be >= 1");
  const double x = params.p11() - params.p01();
  const double denom = params.p01() + params.p10();
  const double xj = std::pow(x, static_cast<double>(j));
  return from == 1 ? (params.p01() + params.p10() * xj) / denom
                   : (params.p01() - params.p01() * xj) / denom;
}

int step_channel(int state, const ChannelParams& params, Rng& rng) {
  return rng.bernoulli(params.transition(state, 1)) ? 1 : 0;
}

} // namespace oppbandit
