#pragma once

#include <optional>
#include <vector>

#include "oppbandit/channel.hpp"

namespace oppbandit {

// Markov chain over the channel-state vector listed in the round-robin
// order, starting at the currently sensed channel. States are packed
// big-endian with the sensed channel as the most significant bit, so the
// states carrying reward occupy the upper half of the index range.
struct OrderedStateChain {
  int num_channels = 0;
  std::size_t size = 0;        // 2^N
  std::vector<double> q;       // row-major transition matrix
  bool irreducible = false;
  bool positive_like = true;
};

// Builds the one-step kernel of the ordered-state chain. Positive
// correlation: a good head keeps the ordering, a bad head rotates to the
// back. Negative correlation: a good head reverses the whole ordering, a bad
// head keeps its place while the rest reverses.
OrderedStateChain build_ordered_chain(const ChannelParams& params, int num_channels,
                                      int max_channels = 12, int jobs = 1);

// Long-run reward rate of the myopic policy: stationary mass of the states
// whose sensed channel is good. Throws ComputationError on a reducible chain.
double throughput_exact(const OrderedStateChain& chain);

// Transmission-period length chains. ExactN2 is the two-channel chain whose
// switch-target belief is the (L+1)-step transition probability; the other
// variants are the first-order systems whose switch-target beliefs bound the
// real ones, used for the throughput bounds beyond two channels.
enum class TpVariant { ExactN2, LowerCaseA, UpperCaseBHypo, LowerCaseBHypo };

struct TpChain {
  TpVariant variant = TpVariant::ExactN2;
  int l_max = 0;
  bool positive_kernel = true;  // geometric body in p11 (else in p00)
  std::vector<double> r;        // row-major (l_max x l_max), tail folded into the last column
  std::vector<double> raw_tail; // per-row mass beyond l_max before folding
  std::vector<double> lambda;   // stationary law of the truncated chain
};

// Builds the truncated TP-length chain. Row i's first column is the
// probability the next period has length 1; longer lengths decay
// geometrically. The mass beyond l_max is folded into the last column, which
// then stands for "length >= l_max".
TpChain tp_chain(const ChannelParams& params, TpVariant variant, int num_channels,
                 int l_max = 200);

struct TpThroughput {
  double value = 0.0;
  double mean_length = 0.0;
  bool tail_warning = false; // raw truncated mass exceeded 1e-10 somewhere
};

// Throughput from the mean TP length: 1 - 1/L for positive correlation and
// 1/L for negative. The folded last state contributes its conditional mean
// length l_max + p11/p10 (or + p00/p01), which the geometric tail makes
// exact, so the truncation itself costs nothing beyond the kernel folding.
TpThroughput tp_throughput(const TpChain& chain, const ChannelParams& params);

// Closed-form two-channel throughput together with its intermediate
// constants. omega_bar / omega_bar_prime is the expected probability that
// the switch target is good under positive / negative correlation.
struct ClosedFormN2 {
  double u = 0.0;
  std::optional<double> omega_bar;
  std::optional<double> omega_bar_prime;
};

ClosedFormN2 closed_form_throughput_n2(const ChannelParams& params);

// Stationary TP-length law implied by the closed form for two channels;
// index l >= 1. Used as the analytic reference for the truncated chain and
// the simulation estimates.
std::vector<double> closed_form_tp_law_n2(const ChannelParams& params, int l_max);

struct ThroughputBounds {
  double lower = 0.0;
  double upper = 0.0;
  // Constants of the bound formulas, kept letter-for-letter.
  std::optional<double> c, d;          // positive correlation
  std::optional<double> e, f, g, h;    // negative correlation
};

// Lower and upper bounds on the myopic throughput for num_channels > 2 (also
// evaluable at 2, where the positive-correlation lower bound coincides with
// the closed form).
ThroughputBounds bounds_throughput(const ChannelParams& params, int num_channels);

// Everything the analyze command reports for one (params, N) cell.
struct ThroughputReport {
  double p01 = 0.0, p11 = 0.0;
  int num_channels = 0;
  std::optional<double> u_exact;   // ordered-chain solve, when 2^N is feasible
  std::optional<double> u_closed;  // N == 2 only
  double u_lower = 0.0, u_upper = 0.0;
  std::optional<double> omega_bar, omega_bar_prime;
  std::optional<double> c, d, e, f, g, h;
  double p01_2 = 0.0, p11_2 = 0.0, p10_2 = 0.0;
};

ThroughputReport analyze_cell(const ChannelParams& params, int num_channels,
                              int exact_cap_channels = 12);

struct RatePoint {
  int num_channels = 0;
  double gap_to_upper = 0.0; // upper bound minus lower bound
  double gap_to_limit = 0.0; // large-N limit of the lower bound minus lower bound
  double ratio = 0.0;        // gap_to_limit / x^N (positive) or / x^(2N) (negative)
};

struct RateReport {
  std::vector<RatePoint> points;
  double rate_base = 0.0;      // |p11 - p01| or its square
  double lower_limit = 0.0;    // large-N limit of the lower bound
  double max_rel_variation = 0.0;
  bool stabilized = false;     // ratio varies by <= 1% across the range
};

// Normalized bound-gap sequence over a range of channel counts. Under
// positive correlation the lower bound closes on the (N-independent) upper
// bound at geometric rate x = p11 - p01; under negative correlation it
// approaches its own limit at rate x^2. x == 0 reports trivially zero gaps.
RateReport rate_check(const ChannelParams& params, int n_min, int n_max);

} // namespace oppbandit
