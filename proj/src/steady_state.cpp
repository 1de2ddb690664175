#include "oppbandit/steady_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "oppbandit/common.hpp"
#include "oppbandit/linalg.hpp"
#include "oppbandit/parallel.hpp"

namespace oppbandit {

OrderedStateChain build_ordered_chain(const ChannelParams& params, int num_channels,
                                      int max_channels, int jobs) {
  if (num_channels < 2)
    throw std::invalid_argument("build_ordered_chain: need at least two channels");
  if (num_channels > max_channels || num_channels > 20)
    throw ResourceError("build_ordered_chain: 2^N exceeds the dense-matrix cap");

  const int n = num_channels;
  const std::size_t size = std::size_t{1} << n;
  OrderedStateChain chain;
  chain.num_channels = n;
  chain.size = size;
  chain.positive_like = params.positive_like();
  chain.q.assign(size * size, 0.0);

  // Bit of position p (p = 0 is the sensed channel).
  const auto bit = [n](std::size_t v, int p) -> int {
    return static_cast<int>((v >> (n - 1 - p)) & 1u);
  };

  parallel_for(size, jobs, [&](std::size_t i) {
    const int head = bit(i, 0);
    for (std::size_t j = 0; j < size; ++j) {
      double q = 1.0;
      if (params.positive_like()) {
        if (head == 1) {
          for (int p = 0; p < n; ++p) q *= params.transition(bit(i, p), bit(j, p));
        } else {
          // Sensed channel moves to the back, everyone else shifts forward.
          q = params.transition(bit(i, 0), bit(j, n - 1));
          for (int p = 1; p < n; ++p)
            q *= params.transition(bit(i, p), bit(j, p - 1));
        }
      } else {
        if (head == 1) {
          // The whole ordering reverses.
          for (int p = 0; p < n; ++p)
            q *= params.transition(bit(i, p), bit(j, n - 1 - p));
        } else {
          // Sensed channel keeps its place, the rest reverses.
          q = params.transition(bit(i, 0), bit(j, 0));
          for (int p = 1; p < n; ++p)
            q *= params.transition(bit(i, p), bit(j, n - p));
        }
      }
      chain.q[i * size + j] = q;
    }
  });

  chain.irreducible = is_irreducible(chain.q, size);
  return chain;
}

double throughput_exact(const OrderedStateChain& chain) {
  if (!chain.irreducible)
    throw ComputationError("throughput_exact: ordered chain is reducible");
  const std::vector<double> pi = stationary_direct(chain.q, chain.size);
  double u = 0.0;
  for (std::size_t i = chain.size / 2; i < chain.size; ++i) u += pi[i];
  return u;
}

namespace {

// Exponent of the switch-target transition probability for row i (1-based).
int kernel_exponent(TpVariant variant, int i, int num_channels) {
  switch (variant) {
    case TpVariant::ExactN2:
      return i + 1;
    case TpVariant::LowerCaseA:
      return num_channels + i - 1;
    case TpVariant::UpperCaseBHypo:
      return (i % 2 == 1) ? i + 1 : i + 4;
    case TpVariant::LowerCaseBHypo:
      return (i % 2 == 1) ? i + 1 : i + 2 * num_channels - 3;
  }
  throw std::invalid_argument("tp_chain: unknown variant");
}

} // namespace

TpChain tp_chain(const ChannelParams& params, TpVariant variant, int num_channels,
                 int l_max) {
  if (l_max < 3) throw std::invalid_argument("tp_chain: l_max must be >= 3");
  const bool positive = params.positive_like();
  if (!positive && (variant == TpVariant::LowerCaseA))
    throw std::invalid_argument("tp_chain: variant requires p11 >= p01");
  if (positive && (variant == TpVariant::UpperCaseBHypo ||
                   variant == TpVariant::LowerCaseBHypo))
    throw std::invalid_argument("tp_chain: variant requires p11 < p01");
  if (positive && params.p10() == 0.0)
    throw std::invalid_argument("tp_chain: p11 = 1 leaves periods unbounded");
  if (!positive && params.p01() == 0.0)
    throw std::invalid_argument("tp_chain: p01 = 0 leaves periods unbounded");

  TpChain chain;
  chain.variant = variant;
  chain.l_max = l_max;
  chain.positive_kernel = positive;
  chain.r.assign(static_cast<std::size_t>(l_max) * l_max, 0.0);
  chain.raw_tail.assign(l_max, 0.0);

  const double body = positive ? params.p11() : params.p00();
  const double exit = positive ? params.p10() : params.p01();
  for (int i = 1; i <= l_max; ++i) {
    const int e = kernel_exponent(variant, i, num_channels);
    // Probability that the switch target is good after e unobserved slots.
    const double w = positive ? j_step_prob(0, e, params) : j_step_prob(1, e, params);
    double* row = &chain.r[static_cast<std::size_t>(i - 1) * l_max];
    row[0] = positive ? 1.0 - w : w;
    const double start = positive ? w : 1.0 - w;
    double geo = start * exit;
    for (int j = 2; j <= l_max; ++j) {
      row[j - 1] = geo;
      geo *= body;
    }
    // Mass beyond l_max folds into the last column, which from here on
    // plays the role of "length >= l_max".
    const double tail = start * std::pow(body, l_max - 1);
    chain.raw_tail[i - 1] = tail;
    row[l_max - 1] += tail;
  }

  chain.lambda = stationary_direct(chain.r, static_cast<std::size_t>(l_max));
  return chain;
}

TpThroughput tp_throughput(const TpChain& chain, const ChannelParams& params) {
  TpThroughput out;
  const int l_max = chain.l_max;
  const double body = chain.positive_kernel ? params.p11() : params.p00();
  const double exit = chain.positive_kernel ? params.p10() : params.p01();

  double mean = 0.0;
  for (int l = 1; l < l_max; ++l)
    mean += static_cast<double>(l) * chain.lambda[l - 1];
  // Conditional mean of the folded geometric tail.
  mean += chain.lambda[l_max - 1] * (static_cast<double>(l_max) + body / exit);
  out.mean_length = mean;
  out.value = params.positive_like() ? 1.0 - 1.0 / mean : 1.0 / mean;
  for (double t : chain.raw_tail)
    if (t > 1e-10) out.tail_warning = true;
  return out;
}

ClosedFormN2 closed_form_throughput_n2(const ChannelParams& params) {
  const double p01 = params.p01();
  const double p11 = params.p11();
  const double x = p11 - p01;
  ClosedFormN2 out;
  if (params.positive_like()) {
    const double p01_2 = params.p00() * p01 + p01 * p11;
    const double a = p01 / (1.0 + p01 - p11) *
                     (1.0 - (x * x * x * (1.0 - p11)) / (1.0 - p11 * p11 + p11 * p01));
    const double omega_bar = p01_2 / (1.0 + p01_2 - a);
    out.omega_bar = omega_bar;
    out.u = 1.0 - (1.0 - p11) / (1.0 + omega_bar - p11);
  } else {
    const double p11_2 = params.p10() * p01 + p11 * p11;
    const double b = p01 / (1.0 + p01 - p11) *
                     (1.0 + (x * x * x * (1.0 - p11)) / (1.0 - (1.0 - p01) * x));
    const double omega_bar_prime = b / (1.0 - p11_2 + b);
    out.omega_bar_prime = omega_bar_prime;
    out.u = p01 / (1.0 - omega_bar_prime + p01);
  }
  return out;
}

std::vector<double> closed_form_tp_law_n2(const ChannelParams& params, int l_max) {
  const ClosedFormN2 cf = closed_form_throughput_n2(params);
  std::vector<double> law(static_cast<std::size_t>(l_max) + 1, 0.0);
  if (params.positive_like()) {
    const double w = *cf.omega_bar;
    law[1] = 1.0 - w;
    double geo = w * params.p10();
    for (int l = 2; l <= l_max; ++l) {
      law[l] = geo;
      geo *= params.p11();
    }
  } else {
    const double w = *cf.omega_bar_prime;
    law[1] = w;
    double geo = (1.0 - w) * params.p01();
    for (int l = 2; l <= l_max; ++l) {
      law[l] = geo;
      geo *= params.p00();
    }
  }
  return law;
}

ThroughputBounds bounds_throughput(const ChannelParams& params, int num_channels) {
  if (num_channels < 2)
    throw std::invalid_argument("bounds_throughput: need at least two channels");
  const double p01 = params.p01();
  const double p11 = params.p11();
  const double wo = params.omega_o();
  const double x = p11 - p01;
  ThroughputBounds out;
  if (params.positive_like()) {
    const double c = wo * (1.0 - std::pow(x, num_channels));
    const double d =
        wo * (1.0 - std::pow(x, num_channels + 1) * (1.0 - p11) /
                        (1.0 - p11 * p11 + p11 * p01));
    out.c = c;
    out.d = d;
    out.lower = c / (c + (1.0 - d + c) * (1.0 - p11));
    out.upper = wo / (1.0 - p11 + wo);
  } else {
    const double p10_2 = params.p10() * params.p00() + p11 * params.p10();
    const double z = 1.0 - x * x * (1.0 - p01) * (1.0 - p01);
    const double f = (1.0 - p01) * (1.0 - wo) *
                     (1.0 / (2.0 - p01) - p01 * std::pow(x, 4) / z);
    const double e = p10_2 * (1.0 + p01) + p01 * (1.0 - f);
    const double g =
        (1.0 - wo) * (1.0 / (2.0 - p01) - p01 * std::pow(x, 6) / z);
    const double h = (1.0 - wo) *
                     (1.0 / (2.0 - p01) -
                      p01 * std::pow(x, 2 * num_channels - 1) / z);
    out.e = e;
    out.f = f;
    out.g = g;
    out.h = h;
    out.lower = 1.0 - p10_2 / (e - p01 * h);
    out.upper = 1.0 - p10_2 / (e - p01 * g);
  }
  return out;
}

ThroughputReport analyze_cell(const ChannelParams& params, int num_channels,
                              int exact_cap_channels) {
  ThroughputReport rep;
  rep.p01 = params.p01();
  rep.p11 = params.p11();
  rep.num_channels = num_channels;
  rep.p01_2 = params.p00() * params.p01() + params.p01() * params.p11();
  rep.p11_2 = params.p10() * params.p01() + params.p11() * params.p11();
  rep.p10_2 = params.p10() * params.p00() + params.p11() * params.p10();

  if (num_channels <= exact_cap_channels) {
    const OrderedStateChain chain = build_ordered_chain(params, num_channels);
    if (chain.irreducible) rep.u_exact = throughput_exact(chain);
  }
  if (num_channels == 2) {
    const ClosedFormN2 cf = closed_form_throughput_n2(params);
    rep.u_closed = cf.u;
    rep.omega_bar = cf.omega_bar;
    rep.omega_bar_prime = cf.omega_bar_prime;
  }

  const ThroughputBounds b = bounds_throughput(params, num_channels);
  rep.u_lower = b.lower;
  rep.u_upper = b.upper;
  rep.c = b.c;
  rep.d = b.d;
  rep.e = b.e;
  rep.f = b.f;
  rep.g = b.g;
  rep.h = b.h;
  return rep;
}

RateReport rate_check(const ChannelParams& params, int n_min, int n_max) {
  if (n_min < 2 || n_max < n_min)
    throw std::invalid_argument("rate_check: need 2 <= n_min <= n_max");
  const double x = std::abs(params.p11() - params.p01());
  RateReport rep;
  const bool positive = params.positive_like();
  rep.rate_base = positive ? x : x * x;

  if (x == 0.0) {
    for (int n = n_min; n <= n_max; ++n) rep.points.push_back({n, 0.0, 0.0, 0.0});
    rep.lower_limit = bounds_throughput(params, n_min).upper;
    rep.stabilized = true;
    return rep;
  }

  // Large-N limit of the lower bound: the x^N (or x^(2N-1)) term vanishes.
  if (positive) {
    rep.lower_limit = bounds_throughput(params, n_min).upper;
  } else {
    const ThroughputBounds base = bounds_throughput(params, n_min);
    const double p01 = params.p01();
    const double p10_2 = params.p10() * params.p00() + params.p11() * params.p10();
    const double h_limit = (1.0 - params.omega_o()) / (2.0 - p01);
    rep.lower_limit = 1.0 - p10_2 / (*base.e - p01 * h_limit);
  }

  double rmin = 0.0, rmax = 0.0;
  bool first = true;
  for (int n = n_min; n <= n_max; ++n) {
    const ThroughputBounds b = bounds_throughput(params, n);
    RatePoint pt;
    pt.num_channels = n;
    pt.gap_to_upper = b.upper - b.lower;
    pt.gap_to_limit = positive ? b.upper - b.lower : rep.lower_limit - b.lower;
    const double denom = positive ? std::pow(x, n) : std::pow(x, 2 * n);
    pt.ratio = pt.gap_to_limit / denom;
    rep.points.push_back(pt);
    if (first || pt.ratio < rmin) rmin = pt.ratio;
    if (first || pt.ratio > rmax) rmax = pt.ratio;
    first = false;
  }
  rep.max_rel_variation = rmin > 0.0 ? (rmax - rmin) / rmin
                                     : (rmax == rmin ? 0.0 : 1.0);
  rep.stabilized = rep.max_rel_variation <= 0.01;
  return rep;
}

} // namespace oppbandit
