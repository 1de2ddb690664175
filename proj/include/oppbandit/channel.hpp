#pragma once

#include <vector>

#include "oppbandit/rng.hpp"

namespace oppbandit {

// Sign of the one-slot state correlation, i.e. the sign of p11 - p01.
enum class Correlation { Positive, Negative, Zero };

// Two-state Markov channel: state 0 is bad, state 1 is good. p01 is the
// bad-to-good transition probability and p11 the good-to-good one.
//
// Validation is exact (no epsilon band): probabilities must lie in [0, 1]
// and the frozen chain p01 = 0, p11 = 1 is rejected. One-sided absorbing
// chains are allowed; their stationary good-state probability omega_o comes
// out of p01 / (p01 + p10) as 0 or 1. Correlation classification compares
// p11 and p01 exactly, so parameters at equality take the Zero (positive
// case) code paths.
class ChannelParams {
public:
  ChannelParams(double p01, double p11);

  double p01() const { return p01_; }
  double p11() const { return p11_; }
  double p00() const { return 1.0 - p01_; }
  double p10() const { return 1.0 - p11_; }

  // Stationary probability of the good state.
  double omega_o() const { return omega_o_; }

  Correlation corr() const { return corr_; }

  // True when p11 >= p01. Equality is routed through the same branches as
  // strictly positive correlation.
  bool positive_like() const { return corr_ != Correlation::Negative; }

  // One-step transition probability from state `from` to state `to`.
  double transition(int from, int to) const;

private:
  double p01_;
  double p11_;
  double omega_o_;
  Correlation corr_;
};

// Per-channel conditional probabilities of being in the good state.
using Belief = std::vector<double>;

// One-slot belief propagation for an unobserved channel:
// tau(w) = p01 + w * (p11 - p01). Monotone increasing in w iff p11 > p01.
double tau(double omega, const ChannelParams& params);

// Bayes update after sensing channel `action` (0-based) and observing its
// state: the sensed entry becomes p11 or p01, every other entry moves
// through tau.
Belief update_belief(const Belief& omega, int action, int observed,
                     const ChannelParams& params);

// j-step transition probability into the good state,
//   from = 0:  (p01 - p01 * (p11-p01)^j) / (p01 + p10)
//   from = 1:  (p01 + p10 * (p11-p01)^j) / (p01 + p10)
// Requires j >= 1. The frozen chain that would make these undefined is
// already rejected at ChannelParams construction.
double j_step_prob(int from, int j, const ChannelParams& params);

// Samples the next channel state. Deterministic given the rng state.
int step_channel(int state, const ChannelParams& params, Rng& rng);

} // namespace oppbandit
