#include "oppbandit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oppbandit/common.hpp"
#include "oppbandit/parallel.hpp"

namespace oppbandit {

std::vector<double> stationary_direct(const std::vector<double>& p, std::size_t n) {
  // Assemble A = P^T - I with the last row replaced by ones, b = e_n.
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] = p[j * n + i] - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) a[(n - 1) * n + j] = 1.0;
  std::vector<double> b(n, 0.0);
  b[n - 1] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < 1e-300)
      throw ComputationError("stationary_direct: singular system (reducible chain?)");
    if (pivot != col) {
      for (std::size_t j = col; j < n; ++j)
        std::swap(a[pivot * n + j], a[col * n + j]);
      std::swap(b[pivot], b[col]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
      b[r] -= f * b[col];
    }
  }

  std::vector<double> pi(n);
  for (std::size_t ir = n; ir-- > 0;) {
    double s = b[ir];
    for (std::size_t j = ir + 1; j < n; ++j) s -= a[ir * n + j] * pi[j];
    pi[ir] = s / a[ir * n + ir];
  }

  // Clip tiny negative round-off and renormalize.
  double sum = 0.0;
  for (double& v : pi) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
    sum += v;
  }
  if (!(sum > 0.0))
    throw ComputationError("stationary_direct: degenerate solution");
  for (double& v : pi) v /= sum;
  return pi;
}

std::vector<double> stationary_power(const std::vector<double>& p, std::size_t n,
                                     double tol, int max_iter, int jobs) {
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (int it = 0; it < max_iter; ++it) {
    parallel_for(n, jobs, [&](std::size_t j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += pi[i] * p[i * n + j];
      next[j] = s;
    });
    double delta = 0.0;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      delta = std::max(delta, std::abs(next[j] - pi[j]));
      sum += next[j];
    }
    for (std::size_t j = 0; j < n; ++j) pi[j] = next[j] / sum;
    if (delta < tol) return pi;
  }
  throw ComputationError("stationary_power: no convergence");
}

namespace {

bool reaches_all(const std::vector<double>& p, std::size_t n, bool transpose) {
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w = 0; w < n; ++w) {
      const double edge = transpose ? p[w * n + v] : p[v * n + w];
      if (edge > 0.0 && !seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n;
}

} // namespace

bool is_irreducible(const std::vector<double>& p, std::size_t n) {
  return reaches_all(p, n, false) && reaches_all(p, n, true);
}

} // namespace oppbandit
