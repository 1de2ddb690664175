#include "oppbandit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oppbandit {

int CircularOrder::next_of(int channel) const {
  const int n = size();
  for (int i = 0; i < n; ++i)
    if (channels[i] == channel) return channels[(i + 1) % n];
  throw std::invalid_argument("CircularOrder: channel not in order");
}

int CircularOrder::prev_of(int channel) const {
  const int n = size();
  for (int i = 0; i < n; ++i)
    if (channels[i] == channel) return channels[(i + n - 1) % n];
  throw std::invalid_argument("CircularOrder: channel not in order");
}

bool CircularOrder::rotation_equivalent(const CircularOrder& other) const {
  const int n = size();
  if (other.size() != n) return false;
  for (int shift = 0; shift < n; ++shift) {
    bool match = true;
    for (int i = 0; i < n && match; ++i)
      match = channels[i] == other.channels[(i + shift) % n];
    if (match) return true;
  }
  return false;
}

CircularOrder initial_order(const Belief& omega1) {
  if (omega1.empty()) throw std::invalid_argument("initial_order: empty belief");
  CircularOrder order;
  order.channels.resize(omega1.size());
  std::iota(order.channels.begin(), order.channels.end(), 0);
  std::stable_sort(order.channels.begin(), order.channels.end(),
                   [&](int a, int b) { return omega1[a] > omega1[b]; });
  return order;
}

StructuralPolicyState initial_structural_state(const Belief& omega1) {
  StructuralPolicyState state;
  state.order = initial_order(omega1);
  state.current = state.order.channels.front();
  state.parity_odd = true;
  return state;
}

StructuralPolicyState structural_next(const StructuralPolicyState& state,
                                      int observed, const ChannelParams& params) {
  StructuralPolicyState next = state;
  next.parity_odd = !state.parity_odd; // parity of the slot being decided
  const bool stay = params.positive_like() ? observed == 1 : observed == 0;
  if (!stay) {
    if (params.positive_like())
      next.current = state.order.next_of(state.current);
    else
      next.current = next.parity_odd ? state.order.next_of(state.current)
                                     : state.order.prev_of(state.current);
  }
  return next;
}

int argmax_myopic(const Belief& omega) {
  if (omega.empty()) throw std::invalid_argument("argmax_myopic: empty belief");
  int best = 0;
  for (int i = 1; i < static_cast<int>(omega.size()); ++i)
    if (omega[i] > omega[best]) best = i;
  return best;
}

int last_visit_policy(const PolicyTrace& history, const ChannelParams& params) {
  const int n = history.num_channels;
  if (history.steps.empty())
    throw std::invalid_argument("last_visit_policy: empty history");
  std::vector<long long> last(n, -1);
  for (const TraceStep& s : history.steps) last[s.action] = s.slot;
  for (int i = 0; i < n; ++i)
    if (last[i] < 0)
      throw std::invalid_argument("last_visit_policy: some channel never visited");

  const long long t = history.steps.back().slot;
  const int current = history.steps.back().action;
  // lag of channel c at the upcoming slot t+1; the current channel has lag 1
  auto lag = [&](int c) { return t + 1 - last[c]; };

  if (params.positive_like()) {
    int pick = -1;
    for (int c = 0; c < n; ++c)
      if (c != current && (pick < 0 || lag(c) > lag(pick))) pick = c;
    return pick < 0 ? current : pick;
  }
  int even_pick = -1;
  int oldest = -1;
  for (int c = 0; c < n; ++c) {
    if (c == current) continue;
    if (lag(c) % 2 == 0 && (even_pick < 0 || lag(c) < lag(even_pick))) even_pick = c;
    if (oldest < 0 || lag(c) > lag(oldest)) oldest = c;
  }
  if (even_pick >= 0) return even_pick;
  return oldest < 0 ? current : oldest;
}

ArgmaxBeliefTracker::ArgmaxBeliefTracker(const ChannelParams& params,
                                         const Belief& omega1)
    : x_(params.p11() - params.p01()),
      log_abs_x_(x_ == 0.0 ? 0.0 : std::log(std::abs(x_))),
      omega_o_(params.omega_o()),
      coeff_(omega1.size()),
      age_(omega1.size(), 0) {
  for (std::size_t i = 0; i < omega1.size(); ++i) coeff_[i] = omega1[i] - omega_o_;
}

double ArgmaxBeliefTracker::belief(int channel) const {
  if (age_[channel] == 0) return omega_o_ + coeff_[channel];
  if (x_ == 0.0) return omega_o_;
  return omega_o_ + coeff_[channel] *
                        std::pow(x_, static_cast<double>(age_[channel]));
}

int ArgmaxBeliefTracker::best() const {
  // Deviation from omega_o is coeff * x^age; compare by sign first, then by
  // log-magnitude, so channels stay distinguishable long after x^age has
  // left double range.
  auto sign_of = [&](int i) -> int {
    if (coeff_[i] == 0.0) return 0;
    if (x_ == 0.0 && age_[i] > 0) return 0;
    int s = coeff_[i] > 0.0 ? 1 : -1;
    if (x_ < 0.0 && (age_[i] & 1)) s = -s;
    return s;
  };
  auto log_mag = [&](int i) {
    return std::log(std::abs(coeff_[i])) +
           static_cast<double>(age_[i]) * log_abs_x_;
  };
  int best = 0;
  for (int i = 1; i < static_cast<int>(coeff_.size()); ++i) {
    const int sb = sign_of(best);
    const int si = sign_of(i);
    bool better = false;
    if (si != sb) {
      better = si > sb;
    } else if (si > 0) {
      better = log_mag(i) > log_mag(best);
    } else if (si < 0) {
      better = log_mag(i) < log_mag(best);
    }
    if (better) best = i;
  }
  return best;
}

void ArgmaxBeliefTracker::advance(int sensed, int observed) {
  for (long long& a : age_) ++a;
  // Observed channel restarts at p_{s1} = omega_o + c_s * x with
  // c_1 = 1 - omega_o and c_0 = -omega_o.
  coeff_[sensed] = observed == 1 ? 1.0 - omega_o_ : -omega_o_;
  age_[sensed] = 1;
}

namespace {

class StructuralStepper final : public PolicyStepper {
public:
  StructuralStepper(const ChannelParams& params, const Belief& omega1)
      : params_(params), state_(initial_structural_state(omega1)) {}
  int first_action() override { return state_.current; }
  int next_action(int observed) override {
    state_ = structural_next(state_, observed, params_);
    return state_.current;
  }

private:
  ChannelParams params_;
  StructuralPolicyState state_;
};

class ArgmaxStepper final : public PolicyStepper {
public:
  ArgmaxStepper(const ChannelParams& params, const Belief& omega1)
      : tracker_(params, omega1), action_(tracker_.best()) {}
  int first_action() override { return action_; }
  int next_action(int observed) override {
    tracker_.advance(action_, observed);
    action_ = tracker_.best();
    return action_;
  }

private:
  ArgmaxBeliefTracker tracker_;
  int action_;
};

class RandomStepper final : public PolicyStepper {
public:
  RandomStepper(int num_channels, Rng* rng) : n_(num_channels), rng_(rng) {}
  int first_action() override { return rng_->uniform_int(n_); }
  int next_action(int) override { return rng_->uniform_int(n_); }

private:
  int n_;
  Rng* rng_;
};

class FixedStepper final : public PolicyStepper {
public:
  explicit FixedStepper(int channel) : channel_(channel) {}
  int first_action() override { return channel_; }
  int next_action(int) override { return channel_; }

private:
  int channel_;
};

} // namespace

std::unique_ptr<PolicyStepper> make_stepper(PolicyKind kind,
                                            const ChannelParams& params,
                                            const Belief& omega1, Rng* policy_rng,
                                            int fixed_channel) {
  switch (kind) {
    case PolicyKind::Structural:
      return std::make_unique<StructuralStepper>(params, omega1);
    case PolicyKind::Argmax:
      return std::make_unique<ArgmaxStepper>(params, omega1);
    case PolicyKind::Random:
      if (!policy_rng)
        throw std::invalid_argument("make_stepper: random policy needs an rng");
      return std::make_unique<RandomStepper>(static_cast<int>(omega1.size()),
                                             policy_rng);
    case PolicyKind::Fixed:
      if (fixed_channel < 0 || fixed_channel >= static_cast<int>(omega1.size()))
        throw std::out_of_range("make_stepper: fixed channel out of range");
      return std::make_unique<FixedStepper>(fixed_channel);
  }
  throw std::invalid_argument("make_stepper: unknown policy");
}

StateTrajectories simulate_states(const ChannelParams& params, int num_channels,
                                  long long horizon, const Belief& omega1,
                                  std::uint64_t seed) {
  if (num_channels <= 0 || horizon < 1)
    throw std::invalid_argument("simulate_states: need N >= 1 and T >= 1");
  if (static_cast<int>(omega1.size()) != num_channels)
    throw std::invalid_argument("simulate_states: belief size mismatch");
  StateTrajectories out;
  out.num_channels = num_channels;
  out.horizon = horizon;
  out.states.resize(static_cast<std::size_t>(horizon) * num_channels);
  for (int i = 0; i < num_channels; ++i) {
    Rng rng(derive_seed(seed, 0, static_cast<std::uint64_t>(i)));
    int s = rng.bernoulli(omega1[i]) ? 1 : 0;
    out.states[i] = static_cast<std::uint8_t>(s);
    for (long long t = 2; t <= horizon; ++t) {
      s = step_channel(s, params, rng);
      out.states[static_cast<std::size_t>(t - 1) * num_channels + i] =
          static_cast<std::uint8_t>(s);
    }
  }
  return out;
}

PolicyTrace run_policy_on_states(PolicyKind kind, const ChannelParams& params,
                                 const Belief& omega1,
                                 const StateTrajectories& states,
                                 std::uint64_t seed, int fixed_channel) {
  Rng policy_rng(derive_seed(seed, 0, static_cast<std::uint64_t>(states.num_channels)));
  auto stepper = make_stepper(kind, params, omega1, &policy_rng, fixed_channel);
  PolicyTrace trace;
  trace.num_channels = states.num_channels;
  trace.steps.reserve(static_cast<std::size_t>(states.horizon));
  int action = stepper->first_action();
  for (long long t = 1; t <= states.horizon; ++t) {
    const int obs = states.at(t, action);
    trace.steps.push_back({t, action, obs, obs});
    if (t < states.horizon) action = stepper->next_action(obs);
  }
  return trace;
}

PolicyTrace run_policy(PolicyKind kind, const ChannelParams& params,
                       int num_channels, long long horizon, const Belief& omega1,
                       std::uint64_t seed, int fixed_channel) {
  return run_policy_on_states(
      kind, params, omega1,
      simulate_states(params, num_channels, horizon, omega1, seed), seed,
      fixed_channel);
}

} // namespace oppbandit
