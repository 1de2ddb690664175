#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "oppbandit/channel.hpp"

namespace oppbandit {

// Exact finite-horizon value computation over the reachable belief set.
//
// Beliefs reachable from a given initial vector form a finite set: every
// channel is either still untouched (its belief is the initial value pushed
// through tau once per elapsed slot) or was last observed in some state s a
// known number of slots ago (its belief is the j-step transition probability
// p_{s1}^{(j)}). States are therefore encoded as per-channel descriptor tags
// instead of raw doubles, which keeps memo keys stable and the state space
// provably finite. Channels are statistically identical, so tag vectors are
// canonicalized by sorting; actions are positions in the canonical vector.

namespace dp_detail {

using Tag = std::uint32_t;
inline constexpr Tag kInitialBit = 0x80000000u;
inline constexpr int kMaxChannels = 8;
inline constexpr Tag kPadTag = 0xffffffffu;

// Untouched channel, identified by the rank of its initial belief among the
// distinct initial values (equal initial beliefs share a rank, which is what
// makes the symmetry reduction exact for them too).
inline Tag initial_tag(int rank) { return kInitialBit | static_cast<Tag>(rank); }
// Channel last observed in state s, k slots in the past (k >= 1).
inline Tag obs_tag(int s, int k) {
  return (static_cast<Tag>(s) << 24) | static_cast<Tag>(k);
}
inline bool tag_is_initial(Tag t) { return (t & kInitialBit) != 0; }
inline int tag_obs_state(Tag t) { return static_cast<int>((t >> 24) & 1); }
inline int tag_age(Tag t) { return static_cast<int>(t & 0x00ffffffu); }
inline int tag_rank(Tag t) { return static_cast<int>(t & 0x00ffffffu); }
// One slot passes without observing this channel.
inline Tag tag_advance(Tag t) { return tag_is_initial(t) ? t : t + 1; }

using State = std::array<Tag, kMaxChannels>;

// Decode tables for one problem instance.
struct DescriptorContext {
  ChannelParams params;
  int num_channels;
  int horizon;
  std::vector<double> unique_initial; // ascending distinct initial beliefs
  std::vector<int> rank_of_channel;
  std::vector<double> init_decode;    // [rank][t]: tau^(t-1) of the value
  std::vector<double> obs_decode;     // [s][k]:   p_{s1}^{(k)}

  DescriptorContext(const ChannelParams& p, const Belief& omega1, int horizon);

  double decode(Tag tag, int slot) const;
  State root() const;
  // Original channel owning each canonical root position (stable order, so
  // the lowest channel index leads within a group of equal beliefs).
  std::vector<int> root_permutation() const;
  // Successor state: every unobserved tag ages one slot and position `pos`
  // becomes an age-1 observation tag for `observed`.
  State successor(const State& state, int pos, int observed) const;
};

} // namespace dp_detail

struct DpLimits {
  std::size_t max_memo_entries = 10'000'000;
  double deviation_tol = 1e-9;
  int jobs = 1;
};

struct DpSolution {
  double v_opt = 0.0;
  double v_myopic = 0.0;
  int first_action = 0; // original channel index, lowest index among ties
  bool deviation_holds = true;
  double worst_violation = 0.0;
  int worst_slot = 0;
  int worst_action = 0;   // position in worst_belief
  Belief worst_belief;    // decoded canonical belief at the worst violation
  std::size_t memo_entries = 0;
};

// One backward recursion covering the optimal value, the myopic value and
// the one-step-deviation test over every reachable belief. Throws
// ResourceError when the reachable-set memo would exceed the cap.
DpSolution solve_dp(const ChannelParams& params, int num_channels, int horizon,
                    const Belief& omega1, const DpLimits& limits = {});

struct OptimalResult {
  double value;
  int first_action;
};

OptimalResult optimal_value(const ChannelParams& params, int num_channels,
                            int horizon, const Belief& omega1,
                            const DpLimits& limits = {});

double myopic_value(const ChannelParams& params, int num_channels, int horizon,
                    const Belief& omega1, const DpLimits& limits = {});

struct DeviationReport {
  bool holds = true;
  double worst_violation = 0.0;
  int worst_slot = 0;
  int worst_action = 0;
  Belief worst_belief;
};

// Evaluates, over every reachable belief at every slot, whether any single
// deviating action followed by myopic play beats straight myopic play.
DeviationReport one_step_deviation_check(const ChannelParams& params,
                                         int num_channels, int horizon,
                                         const Belief& omega1,
                                         const DpLimits& limits = {});

struct Counterexample {
  double p01 = 0.0;
  double p11 = 0.0;
  int horizon = 0;
  Belief omega1;
  double gap = 0.0;     // v_opt - v_myopic
  double rel_gap = 0.0; // gap / v_opt
};

struct CounterexampleQuery {
  std::vector<double> p01s;
  std::vector<double> p11s;
  int num_channels = 3;
  int t_min = 2;
  int t_max = 8;
  int random_beliefs_per_cell = 0; // stationary preset is always included
  std::uint64_t seed = 0;
  double tol = 1e-9;
  DpLimits limits;
  int jobs = 1;
};

// Grid sweep comparing myopic and optimal values; returns every point whose
// gap exceeds the tolerance, in deterministic grid order.
std::vector<Counterexample> counterexample_search(const CounterexampleQuery& query);

} // namespace oppbandit
