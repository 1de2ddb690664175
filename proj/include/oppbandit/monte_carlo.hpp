#pragma once

#include <cstdint>
#include <vector>

#include "oppbandit/channel.hpp"
#include "oppbandit/policy.hpp"

namespace oppbandit {

enum class InitBelief { Stationary, AllGood, AllBad, Custom };

struct SimConfig {
  explicit SimConfig(const ChannelParams& p) : params(p) {}

  ChannelParams params;
  int num_channels = 2;
  long long horizon = 1000; // slots per replication
  PolicyKind policy = PolicyKind::Structural;
  int fixed_channel = 0;
  std::uint64_t seed = 0;
  InitBelief init = InitBelief::Stationary;
  Belief omega1;            // used when init == Custom
  int replications = 1;
  int jobs = 1;             // replication-level parallelism
};

struct SimResult {
  double mean_reward = 0.0;     // per-slot average over all replications
  double stderr_batch = 0.0;    // batch-means standard error (batches of 1000 slots)
  long long batches = 0;
  std::vector<double> replication_means;
  // Completed transmission periods, first and last of each replication
  // excluded as censored; tp_histogram[l] counts TPs of length l.
  std::vector<long long> tp_histogram;
  long long tp_count = 0;
  long long total_slots = 0;
  bool positive_like = true;
};

// Seeded simulation of the full system. Channel i of replication r draws
// from derive_seed(seed, r, i) and the policy stream of replication r from
// derive_seed(seed, r, N), so results are reproducible and independent of
// jobs. Initial states are drawn from omega1. For the structural and argmax
// policies the run also checks the reward dichotomy at every switch slot
// (reward 0 under positive correlation, reward 1 under negative) and throws
// ComputationError on violation.
SimResult simulate(const SimConfig& cfg);

Belief resolve_initial_belief(const SimConfig& cfg);

struct TpStats {
  std::vector<double> lambda_hat; // empirical TP-length law, index = length
  double l_bar = 0.0;
  double l_bar_stderr = 0.0;
  double implied_throughput = 0.0; // 1 - 1/l_bar or 1/l_bar by correlation sign
  long long count = 0;
};

// Empirical transmission-period statistics. Throws ComputationError when the
// run completed no interior TP (horizon too small or no switches).
TpStats tp_statistics(const SimResult& result);

} // namespace oppbandit
