#include "oppbandit/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oppbandit/common.hpp"
#include "oppbandit/parallel.hpp"

namespace oppbandit {

Belief resolve_initial_belief(const SimConfig& cfg) {
  switch (cfg.init) {
    case InitBelief::Stationary:
      return Belief(cfg.num_channels, cfg.params.omega_o());
    case InitBelief::AllGood:
      return Belief(cfg.num_channels, 1.0);
    case InitBelief::AllBad:
      return Belief(cfg.num_channels, 0.0);
    case InitBelief::Custom:
      if (static_cast<int>(cfg.omega1.size()) != cfg.num_channels)
        throw std::invalid_argument("simulate: custom belief size mismatch");
      return cfg.omega1;
  }
  throw std::invalid_argument("simulate: unknown initial belief preset");
}

namespace {

constexpr long long kBatchSlots = 1000;

struct RepOutcome {
  double total_reward = 0.0;
  std::vector<double> batch_means;
  std::vector<long long> tp_lengths; // interior completed TPs, in order
};

RepOutcome run_replication(const SimConfig& cfg, const Belief& omega1, int rep) {
  const int n = cfg.num_channels;
  const long long horizon = cfg.horizon;

  std::vector<Rng> channel_rng;
  channel_rng.reserve(n);
  for (int i = 0; i < n; ++i)
    channel_rng.emplace_back(derive_seed(cfg.seed, rep, static_cast<std::uint64_t>(i)));
  Rng policy_rng(derive_seed(cfg.seed, rep, static_cast<std::uint64_t>(n)));

  std::vector<int> state(n);
  for (int i = 0; i < n; ++i) state[i] = channel_rng[i].bernoulli(omega1[i]) ? 1 : 0;

  auto stepper = make_stepper(cfg.policy, cfg.params, omega1, &policy_rng,
                              cfg.fixed_channel);
  const bool myopic_like =
      cfg.policy == PolicyKind::Structural || cfg.policy == PolicyKind::Argmax;

  RepOutcome out;
  out.batch_means.reserve(static_cast<std::size_t>(horizon / kBatchSlots));

  int action = stepper->first_action();
  long long run_start = 1;      // first slot of the current TP
  bool first_tp = true;
  double batch_sum = 0.0;
  long long batch_fill = 0;

  for (long long t = 1; t <= horizon; ++t) {
    const int obs = state[action];
    out.total_reward += obs;
    batch_sum += obs;
    if (++batch_fill == kBatchSlots) {
      out.batch_means.push_back(batch_sum / static_cast<double>(kBatchSlots));
      batch_sum = 0.0;
      batch_fill = 0;
    }

    if (t < horizon) {
      for (int i = 0; i < n; ++i)
        state[i] = step_channel(state[i], cfg.params, channel_rng[i]);
      const int next = stepper->next_action(obs);
      if (next != action) {
        // Switch slot: the slot just played closes the current TP.
        if (myopic_like) {
          const int expected = cfg.params.positive_like() ? 0 : 1;
          if (obs != expected)
            throw ComputationError("simulate: switch-slot reward dichotomy violated");
        }
        if (!first_tp) out.tp_lengths.push_back(t - run_start + 1);
        first_tp = false;
        run_start = t + 1;
        action = next;
      }
    }
  }
  // The TP still open at the horizon is censored and dropped.
  return out;
}

} // namespace

SimResult simulate(const SimConfig& cfg) {
  if (cfg.replications < 1) throw std::invalid_argument("simulate: replications >= 1");
  if (cfg.horizon < 1) throw std::invalid_argument("simulate: horizon >= 1");
  const Belief omega1 = resolve_initial_belief(cfg);

  std::vector<RepOutcome> reps(cfg.replications);
  parallel_for(static_cast<std::size_t>(cfg.replications), cfg.jobs,
               [&](std::size_t r) {
                 reps[r] = run_replication(cfg, omega1, static_cast<int>(r));
               });

  // Deterministic-order reduction so parallel and serial runs agree.
  SimResult res;
  res.positive_like = cfg.params.positive_like();
  res.total_slots = cfg.horizon * cfg.replications;
  res.replication_means.reserve(cfg.replications);

  double total = 0.0;
  std::vector<double> batch_means;
  for (const RepOutcome& r : reps) {
    total += r.total_reward;
    res.replication_means.push_back(r.total_reward / static_cast<double>(cfg.horizon));
    batch_means.insert(batch_means.end(), r.batch_means.begin(), r.batch_means.end());
    for (long long len : r.tp_lengths) {
      if (static_cast<std::size_t>(len) >= res.tp_histogram.size())
        res.tp_histogram.resize(static_cast<std::size_t>(len) + 1, 0);
      ++res.tp_histogram[static_cast<std::size_t>(len)];
      ++res.tp_count;
    }
  }
  res.mean_reward = total / static_cast<double>(res.total_slots);
  res.batches = static_cast<long long>(batch_means.size());
  if (res.batches >= 2) {
    double m = 0.0;
    for (double b : batch_means) m += b;
    m /= static_cast<double>(res.batches);
    double ss = 0.0;
    for (double b : batch_means) ss += (b - m) * (b - m);
    const double var = ss / static_cast<double>(res.batches - 1);
    res.stderr_batch = std::sqrt(var / static_cast<double>(res.batches));
  }
  return res;
}

TpStats tp_statistics(const SimResult& result) {
  if (result.tp_count <= 0)
    throw ComputationError("tp_statistics: no completed transmission period");
  TpStats stats;
  stats.count = result.tp_count;
  stats.lambda_hat.assign(result.tp_histogram.size(), 0.0);
  double sum_l = 0.0;
  double sum_l2 = 0.0;
  for (std::size_t l = 1; l < result.tp_histogram.size(); ++l) {
    const double c = static_cast<double>(result.tp_histogram[l]);
    stats.lambda_hat[l] = c / static_cast<double>(result.tp_count);
    sum_l += c * static_cast<double>(l);
    sum_l2 += c * static_cast<double>(l) * static_cast<double>(l);
  }
  const double n = static_cast<double>(result.tp_count);
  stats.l_bar = sum_l / n;
  const double var = std::max(0.0, sum_l2 / n - stats.l_bar * stats.l_bar);
  stats.l_bar_stderr = std::sqrt(var / n);
  stats.implied_throughput =
      result.positive_like ? 1.0 - 1.0 / stats.l_bar : 1.0 / stats.l_bar;
  return stats;
}

} // namespace oppbandit
