#pragma once

#include <cstddef>
#include <vector>

namespace oppbandit {

// Dense row-major helpers for stationary distributions of row-stochastic
// matrices. Two independent routes are kept on purpose: the direct solve is
// the serial reference, the power iteration is the OpenMP kernel, and tests
// compare them against each other.

// Solves pi^T P = pi^T, sum(pi) = 1 by Gaussian elimination with partial
// pivoting on (P^T - I) with the last equation replaced by the normalization.
// Throws ComputationError when the system is numerically singular.
std::vector<double> stationary_direct(const std::vector<double>& p, std::size_t n);

// Repeated multiplication pi <- pi P until the sup-norm change falls below
// tol. Matvec rows are dispatched across `jobs` OpenMP threads; the result
// is identical for any jobs value. Throws ComputationError when the
// iteration fails to converge.
std::vector<double> stationary_power(const std::vector<double>& p, std::size_t n,
                                     double tol = 1e-14, int max_iter = 500000,
                                     int jobs = 1);

// Strong connectivity of the support graph of P.
bool is_irreducible(const std::vector<double>& p, std::size_t n);

} // namespace oppbandit
