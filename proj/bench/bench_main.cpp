// Times the OpenMP kernels against their serial reference paths and checks
// that both produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "oppbandit/dp.hpp"
#include "oppbandit/experiment.hpp"
#include "oppbandit/linalg.hpp"
#include "oppbandit/monte_carlo.hpp"
#include "oppbandit/parallel.hpp"
#include "oppbandit/steady_state.hpp"

using namespace oppbandit;

namespace {

double time_ms(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const std::string& name, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-34s %9.1f ms %9.1f ms %6.2fx  %s\n", name.c_str(), serial_ms,
              parallel_ms, serial_ms / parallel_ms,
              identical ? "results identical" : "RESULTS DIFFER");
}

} // namespace

int main() {
  const int jobs = hardware_jobs();
  std::printf("serial reference vs OpenMP kernels (%d threads)\n", jobs);
  std::printf("%-34s %12s %12s %7s\n", "kernel", "serial", "parallel", "speedup");

  {
    const ChannelParams p(0.3, 0.7);
    const Belief w = {0.1, 0.4, 0.8, 0.6};
    DpLimits serial_limits;
    DpLimits parallel_limits;
    parallel_limits.jobs = jobs;
    DpSolution a, b;
    const double ts = time_ms([&] { a = solve_dp(p, 4, 13, w, serial_limits); });
    const double tp = time_ms([&] { b = solve_dp(p, 4, 13, w, parallel_limits); });
    report("dp backward recursion (N=4 T=13)", ts, tp,
           a.v_opt == b.v_opt && a.v_myopic == b.v_myopic);
  }

  {
    SimConfig cfg(ChannelParams(0.2, 0.8));
    cfg.num_channels = 4;
    cfg.horizon = 1000000;
    cfg.replications = 8;
    cfg.seed = 77;
    SimResult a, b;
    cfg.jobs = 1;
    const double ts = time_ms([&] { a = simulate(cfg); });
    cfg.jobs = jobs;
    const double tp = time_ms([&] { b = simulate(cfg); });
    report("monte carlo (8 x 1e6 slots)", ts, tp,
           a.mean_reward == b.mean_reward && a.tp_histogram == b.tp_histogram);
  }

  {
    const OrderedStateChain chain = build_ordered_chain(ChannelParams(0.4, 0.7), 10);
    std::vector<double> direct, power;
    const double ts =
        time_ms([&] { direct = stationary_direct(chain.q, chain.size); });
    const double tp = time_ms(
        [&] { power = stationary_power(chain.q, chain.size, 1e-14, 500000, jobs); });
    double diff = 0.0;
    for (std::size_t i = 0; i < chain.size; ++i)
      diff = std::max(diff, std::abs(direct[i] - power[i]));
    report("stationary solve (1024 states)", ts, tp, diff < 1e-9);
  }

  {
    ExperimentSpec spec;
    spec.command = "bounds";
    spec.p01s.clear();
    for (int k = 1; k <= 14; ++k) spec.p01s.push_back(0.05 + 0.06 * k);
    spec.p11s = {0.3, 0.6, 0.9};
    spec.ns = {6, 7, 8};
    Table a, b;
    spec.jobs = 1;
    const double ts = time_ms([&] { a = run_experiment(spec); });
    spec.jobs = jobs;
    const double tp = time_ms([&] { b = run_experiment(spec); });
    report("bounds grid sweep (126 cells)", ts, tp,
           render_csv(a) == render_csv(b));
  }

  return 0;
}
