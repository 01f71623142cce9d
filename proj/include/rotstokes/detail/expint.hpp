#pragma once

// Generalized exponential integral E_n(z) = ∫_1^∞ e^{-zu} u^{-n} du for
// complex z with Re z >= 0, as needed by the analytic large-time tails.

#include <complex>
#include <vector>

namespace rotstokes::detail {

/// E_n(z) for n >= 1 and z != 0 with Re z >= 0; E_n(0) = 1/(n-1) for n >= 2.
std::complex<double> expint_n(int n, std::complex<double> z);

/// E_1(z), ..., E_nmax(z) at a fixed argument. Entry k holds E_{k+1}(z).
/// Uses one direct evaluation near n ≈ |z| and stable recurrences outward.
std::vector<std::complex<double>> expint_table(int nmax, std::complex<double> z);

}  // namespace rotstokes::detail
