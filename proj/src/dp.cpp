#include "oppbandit/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "oppbandit/common.hpp"
#include "oppbandit/parallel.hpp"
#include "oppbandit/rng.hpp"

namespace oppbandit {

namespace dp_detail {

DescriptorContext::DescriptorContext(const ChannelParams& p, const Belief& omega1,
                                     int horizon_)
    : params(p), num_channels(static_cast<int>(omega1.size())), horizon(horizon_) {
  if (num_channels < 1 || num_channels > kMaxChannels)
    throw ResourceError("dp: channel count outside supported range (1.." +
                        std::to_string(kMaxChannels) + ")");
  if (horizon < 1) throw std::invalid_argument("dp: horizon must be >= 1");
  for (double w : omega1)
    if (!(w >= 0.0 && w <= 1.0))
      throw std::invalid_argument("dp: beliefs must lie in [0, 1]");

  unique_initial = omega1;
  std::sort(unique_initial.begin(), unique_initial.end());
  unique_initial.erase(std::unique(unique_initial.begin(), unique_initial.end()),
                       unique_initial.end());
  rank_of_channel.resize(num_channels);
  for (int i = 0; i < num_channels; ++i)
    rank_of_channel[i] = static_cast<int>(
        std::lower_bound(unique_initial.begin(), unique_initial.end(), omega1[i]) -
        unique_initial.begin());

  const int stride = horizon + 1;
  init_decode.assign(unique_initial.size() * stride, 0.0);
  for (std::size_t r = 0; r < unique_initial.size(); ++r) {
    double w = unique_initial[r];
    for (int t = 1; t <= horizon; ++t) {
      init_decode[r * stride + t] = w; // tau applied t-1 times
      w = tau(w, params);
    }
  }
  obs_decode.assign(2 * static_cast<std::size_t>(stride), 0.0);
  for (int s = 0; s < 2; ++s)
    for (int k = 1; k <= horizon; ++k)
      obs_decode[static_cast<std::size_t>(s) * stride + k] = j_step_prob(s, k, params);
}

double DescriptorContext::decode(Tag tag, int slot) const {
  const int stride = horizon + 1;
  if (tag_is_initial(tag))
    return init_decode[static_cast<std::size_t>(tag_rank(tag)) * stride + slot];
  return obs_decode[static_cast<std::size_t>(tag_obs_state(tag)) * stride +
                    tag_age(tag)];
}

State DescriptorContext::root() const {
  State s;
  s.fill(kPadTag);
  for (int i = 0; i < num_channels; ++i) s[i] = initial_tag(rank_of_channel[i]);
  std::sort(s.begin(), s.begin() + num_channels);
  return s;
}

std::vector<int> DescriptorContext::root_permutation() const {
  std::vector<int> perm(num_channels);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return rank_of_channel[a] < rank_of_channel[b];
  });
  return perm;
}

State DescriptorContext::successor(const State& state, int pos, int observed) const {
  State next;
  next.fill(kPadTag);
  for (int i = 0; i < num_channels; ++i) next[i] = tag_advance(state[i]);
  next[pos] = obs_tag(observed, 1);
  std::sort(next.begin(), next.begin() + num_channels);
  return next;
}

} // namespace dp_detail

namespace {

using dp_detail::DescriptorContext;
using dp_detail::State;

struct Levels {
  // per_slot[t-1]: canonical states reachable at slot t, sorted.
  std::vector<std::vector<State>> per_slot;
  std::size_t total_entries = 0;
};

Levels enumerate_levels(const DescriptorContext& ctx, const DpLimits& limits) {
  Levels levels;
  levels.per_slot.resize(ctx.horizon);
  levels.per_slot[0] = {ctx.root()};
  levels.total_entries = 1;

  const int n = ctx.num_channels;
  for (int t = 1; t < ctx.horizon; ++t) {
    const std::vector<State>& cur = levels.per_slot[t - 1];
    std::vector<State> out(cur.size() * 2 * n);
    std::vector<std::uint8_t> counts(cur.size());
    parallel_for(cur.size(), limits.jobs, [&](std::size_t s) {
      const State& st = cur[s];
      std::uint8_t c = 0;
      for (int a = 0; a < n; ++a) {
        if (a > 0 && st[a] == st[a - 1]) continue; // identical tags, identical successors
        out[s * 2 * n + c++] = ctx.successor(st, a, 0);
        out[s * 2 * n + c++] = ctx.successor(st, a, 1);
      }
      counts[s] = c;
    });
    std::vector<State> next;
    next.reserve(cur.size() * 2 * n);
    for (std::size_t s = 0; s < cur.size(); ++s)
      for (std::uint8_t c = 0; c < counts[s]; ++c) next.push_back(out[s * 2 * n + c]);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    levels.total_entries += next.size();
    if (levels.total_entries > limits.max_memo_entries)
      throw ResourceError("dp: reachable-set memo exceeds the configured cap");
    levels.per_slot[t] = std::move(next);
  }
  return levels;
}

std::size_t index_of(const std::vector<State>& level, const State& s) {
  return static_cast<std::size_t>(
      std::lower_bound(level.begin(), level.end(), s) - level.begin());
}

} // namespace

DpSolution solve_dp(const ChannelParams& params, int num_channels, int horizon,
                    const Belief& omega1, const DpLimits& limits) {
  if (static_cast<int>(omega1.size()) != num_channels)
    throw std::invalid_argument("dp: belief size mismatch");
  const DescriptorContext ctx(params, omega1, horizon);
  const Levels levels = enumerate_levels(ctx, limits);
  const int n = num_channels;

  std::vector<std::vector<double>> v(horizon), vhat(horizon);
  {
    // Terminal slot: the value is the best immediate reward.
    const std::vector<State>& last = levels.per_slot[horizon - 1];
    v[horizon - 1].resize(last.size());
    parallel_for(last.size(), limits.jobs, [&](std::size_t s) {
      double m = 0.0;
      for (int a = 0; a < n; ++a)
        m = std::max(m, ctx.decode(last[s][a], horizon));
      v[horizon - 1][s] = m;
    });
    vhat[horizon - 1] = v[horizon - 1];
  }

  double worst = 0.0;
  int worst_slot = 0;
  std::size_t worst_state = 0;
  int worst_action = 0;

  std::vector<double> dev;
  std::vector<int> dev_action;
  for (int t = horizon - 1; t >= 1; --t) {
    const std::vector<State>& level = levels.per_slot[t - 1];
    const std::vector<State>& nxt = levels.per_slot[t];
    const std::vector<double>& v_next = v[t];
    const std::vector<double>& vhat_next = vhat[t];
    v[t - 1].assign(level.size(), 0.0);
    vhat[t - 1].assign(level.size(), 0.0);
    dev.assign(level.size(), 0.0);
    dev_action.assign(level.size(), 0);

    parallel_for(level.size(), limits.jobs, [&](std::size_t s) {
      const State& st = level[s];
      double beliefs[dp_detail::kMaxChannels];
      for (int a = 0; a < n; ++a) beliefs[a] = ctx.decode(st[a], t);
      // Equal tags sit adjacent after canonical sorting, so the first strict
      // maximum is always a tag-group representative.
      int myopic = 0;
      for (int a = 1; a < n; ++a)
        if (beliefs[a] > beliefs[myopic]) myopic = a;

      double best_opt = -std::numeric_limits<double>::infinity();
      double myopic_hat = 0.0;
      double q_hats[dp_detail::kMaxChannels];
      for (int a = 0; a < n; ++a) {
        if (a > 0 && st[a] == st[a - 1]) {
          q_hats[a] = q_hats[a - 1];
          continue;
        }
        const double w = beliefs[a];
        const std::size_t i1 = index_of(nxt, ctx.successor(st, a, 1));
        const std::size_t i0 = index_of(nxt, ctx.successor(st, a, 0));
        const double q_opt = w + w * v_next[i1] + (1.0 - w) * v_next[i0];
        q_hats[a] = w + w * vhat_next[i1] + (1.0 - w) * vhat_next[i0];
        best_opt = std::max(best_opt, q_opt);
        if (a == myopic) myopic_hat = q_hats[a];
      }
      double worst_dev = 0.0;
      int worst_dev_action = 0;
      for (int a = 0; a < n; ++a) {
        const double viol = q_hats[a] - myopic_hat;
        if (viol > worst_dev) {
          worst_dev = viol;
          worst_dev_action = a;
        }
      }
      v[t - 1][s] = best_opt;
      vhat[t - 1][s] = myopic_hat;
      dev[s] = worst_dev;
      dev_action[s] = worst_dev_action;
    });

    for (std::size_t s = 0; s < level.size(); ++s) {
      if (dev[s] > worst) {
        worst = dev[s];
        worst_slot = t;
        worst_state = s;
        worst_action = dev_action[s];
      }
    }
  }

  DpSolution sol;
  sol.memo_entries = levels.total_entries;
  sol.v_opt = v[0].front();
  sol.v_myopic = vhat[0].front();
  sol.worst_violation = worst;
  sol.worst_slot = worst_slot;
  sol.worst_action = worst_action;
  sol.deviation_holds = worst <= limits.deviation_tol;
  if (worst > 0.0) {
    const State& st = levels.per_slot[worst_slot - 1][worst_state];
    sol.worst_belief.assign(n, 0.0);
    for (int a = 0; a < n; ++a) sol.worst_belief[a] = ctx.decode(st[a], worst_slot);
  }

  // Best slot-1 action, reported as an original channel index (the stable
  // root permutation puts the lowest channel index first within a group of
  // equal initial beliefs).
  {
    const State root = ctx.root();
    const std::vector<int> perm = ctx.root_permutation();
    int best_pos = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      if (a > 0 && root[a] == root[a - 1]) continue;
      const double w = ctx.decode(root[a], 1);
      double q = w;
      if (horizon > 1) {
        const std::vector<State>& level2 = levels.per_slot[1];
        q += w * v[1][index_of(level2, ctx.successor(root, a, 1))] +
             (1.0 - w) * v[1][index_of(level2, ctx.successor(root, a, 0))];
      }
      if (q > best_q) {
        best_q = q;
        best_pos = a;
      }
    }
    sol.first_action = perm[best_pos];
  }
  return sol;
}

OptimalResult optimal_value(const ChannelParams& params, int num_channels,
                            int horizon, const Belief& omega1,
                            const DpLimits& limits) {
  const DpSolution sol = solve_dp(params, num_channels, horizon, omega1, limits);
  return {sol.v_opt, sol.first_action};
}

double myopic_value(const ChannelParams& params, int num_channels, int horizon,
                    const Belief& omega1, const DpLimits& limits) {
  return solve_dp(params, num_channels, horizon, omega1, limits).v_myopic;
}

DeviationReport one_step_deviation_check(const ChannelParams& params,
                                         int num_channels, int horizon,
                                         const Belief& omega1,
                                         const DpLimits& limits) {
  const DpSolution sol = solve_dp(params, num_channels, horizon, omega1, limits);
  DeviationReport rep;
  rep.holds = sol.deviation_holds;
  rep.worst_violation = sol.worst_violation;
  rep.worst_slot = sol.worst_slot;
  rep.worst_action = sol.worst_action;
  rep.worst_belief = sol.worst_belief;
  return rep;
}

std::vector<Counterexample> counterexample_search(const CounterexampleQuery& query) {
  struct Cell {
    double p01, p11;
  };
  std::vector<Cell> cells;
  for (double a : query.p01s)
    for (double b : query.p11s) cells.push_back({a, b});

  std::vector<std::vector<Counterexample>> found(cells.size());
  parallel_for(cells.size(), query.jobs, [&](std::size_t c) {
    const ChannelParams params(cells[c].p01, cells[c].p11);
    std::vector<Belief> beliefs;
    beliefs.emplace_back(query.num_channels, params.omega_o());
    Rng rng(derive_seed(query.seed, c));
    for (int b = 0; b < query.random_beliefs_per_cell; ++b) {
      Belief w(query.num_channels);
      for (double& x : w) x = rng.next_unit();
      beliefs.push_back(std::move(w));
    }
    DpLimits limits = query.limits;
    limits.jobs = 1; // grid cells already run in parallel
    for (const Belief& w : beliefs) {
      for (int t = query.t_min; t <= query.t_max; ++t) {
        const DpSolution sol = solve_dp(params, query.num_channels, t, w, limits);
        const double gap = sol.v_opt - sol.v_myopic;
        if (gap > query.tol)
          found[c].push_back({cells[c].p01, cells[c].p11, t, w, gap,
                              sol.v_opt > 0.0 ? gap / sol.v_opt : 0.0});
      }
    }
  });

  std::vector<Counterexample> out;
  for (const auto& f : found) out.insert(out.end(), f.begin(), f.end());
  return out;
}

} // namespace oppbandit
