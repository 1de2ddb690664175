#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "oppbandit/channel.hpp"

namespace oppbandit {

// Circular arrangement of channel indices. Two orders are the same circular
// order when one is a rotation of the other; the starting point carries no
// meaning beyond bookkeeping.
struct CircularOrder {
  std::vector<int> channels; // some permutation of 0..N-1

  int size() const { return static_cast<int>(channels.size()); }

  // Successor of `channel` walking forward / backward around the circle.
  int next_of(int channel) const;
  int prev_of(int channel) const;

  bool rotation_equivalent(const CircularOrder& other) const;
};

// Builds the round-robin order from the initial belief: channels sorted by
// descending belief, ties broken toward the lower channel index. The head
// (first entry) is the slot-1 action.
CircularOrder initial_order(const Belief& omega1);

// State machine of the round-robin form of the myopic policy. `current` is
// the channel sensed in the slot about to be played and `parity_odd` that
// slot's parity (slot 1 is odd). The parity is stored rather than recomputed
// so the machine is self-contained.
struct StructuralPolicyState {
  CircularOrder order; // fixed slot-1 order
  int current = 0;
  bool parity_odd = true;
};

StructuralPolicyState initial_structural_state(const Belief& omega1);

// Advances the machine with the observation of the current slot and returns
// the state for the next slot. Positive correlation: stay on a good channel,
// otherwise move to the next channel in the fixed order. Negative
// correlation: stay on a bad channel, otherwise move to the next channel in
// the current order, which is the slot-1 order on odd slots and its reversal
// on even slots.
StructuralPolicyState structural_next(const StructuralPolicyState& state,
                                      int observed, const ChannelParams& params);

// Largest-belief channel with ties broken toward the lower index.
int argmax_myopic(const Belief& omega);

struct TraceStep {
  long long slot;   // 1-based
  int action;       // 0-based channel index
  int observation;  // state of the sensed channel
  int reward;       // equals the observation
};

// Actions, observations and rewards of one run. Only sensed channels are
// recorded; full state trajectories live with the simulator and are used by
// oracle tests only.
struct PolicyTrace {
  int num_channels = 0;
  std::vector<TraceStep> steps;
};

// Switch target derived from visit recency, applicable once every channel
// appears in the history. Positive correlation: the least recently visited
// channel. Negative correlation: the most recently visited channel among
// those whose last visit is an even number of slots in the past, or the
// least recently visited channel when there is none.
int last_visit_policy(const PolicyTrace& history, const ChannelParams& params);

enum class PolicyKind { Structural, Argmax, Random, Fixed };

// Exogenous channel-state trajectories: states(t, i) for slot t (1-based)
// and channel i. Channel states evolve independently of the sensing policy,
// so one realization can replay under several policies.
struct StateTrajectories {
  int num_channels = 0;
  long long horizon = 0;
  std::vector<std::uint8_t> states; // (t-1) * num_channels + i

  int at(long long t, int channel) const {
    return states[static_cast<std::size_t>(t - 1) * num_channels + channel];
  }
};

// Draws initial states from omega1 and evolves every channel through the
// chain, one derived rng stream per channel: channel i of replication 0 uses
// derive_seed(seed, 0, i).
StateTrajectories simulate_states(const ChannelParams& params, int num_channels,
                                  long long horizon, const Belief& omega1,
                                  std::uint64_t seed);

// Replays a policy against fixed trajectories. The random policy draws from
// derive_seed(seed, 0, num_channels).
PolicyTrace run_policy_on_states(PolicyKind kind, const ChannelParams& params,
                                 const Belief& omega1,
                                 const StateTrajectories& states,
                                 std::uint64_t seed, int fixed_channel = 0);

// Simulates states and replays in one call.
PolicyTrace run_policy(PolicyKind kind, const ChannelParams& params,
                       int num_channels, long long horizon, const Belief& omega1,
                       std::uint64_t seed, int fixed_channel = 0);

// Incremental action chooser shared by run_policy and the Monte Carlo loop.
class PolicyStepper {
public:
  virtual ~PolicyStepper() = default;
  virtual int first_action() = 0;
  // Observation of the previous slot's action; returns the next action.
  virtual int next_action(int observed) = 0;
};

std::unique_ptr<PolicyStepper> make_stepper(PolicyKind kind,
                                            const ChannelParams& params,
                                            const Belief& omega1, Rng* policy_rng,
                                            int fixed_channel = 0);

// Belief state of the argmax policy in closed form: channel i's belief is
// omega_o + coeff[i] * (p11 - p01)^age[i]. Beliefs propagated as plain
// doubles drift onto the fixed point after enough unobserved slots, at which
// point float comparisons can no longer separate channels whose exact
// beliefs still differ; comparing (coeff, age) in the log domain keeps the
// exact order at any horizon. Ties of the exact values break toward the
// lower channel index, matching argmax_myopic.
class ArgmaxBeliefTracker {
public:
  ArgmaxBeliefTracker(const ChannelParams& params, const Belief& omega1);

  int best() const;
  void advance(int sensed, int observed);
  double belief(int channel) const; // decoded value, for inspection

private:
  double x_;
  double log_abs_x_;
  double omega_o_;
  std::vector<double> coeff_;
  std::vector<long long> age_;
};

} // namespace oppbandit
