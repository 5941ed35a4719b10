#pragma once

namespace ehpc {

/// Exponential integral E1(y) = int_y^inf e^-x / x dx, y > 0.
double exponential_integral_e1(double y);

/// e^y E1(y), finite for arguments where e^y alone overflows.
double scaled_exponential_integral_e1(double y);

/// Upper incomplete Gamma function int_y^inf x^(n-1) e^-x dx for n >= 0,
/// y >= 0. Integer orders use the finite series, n = 0 reduces to E1, other
/// orders use the series / continued-fraction pair.
///
/// Throws std::invalid_argument for negative or non-finite arguments and
/// std::domain_error for the divergent case n = 0, y = 0.
double upper_incomplete_gamma(double n, double y);

/// Regularized upper tail Q(n, y) = upper_incomplete_gamma(n, y) / Gamma(n),
/// n > 0.
double regularized_upper_gamma(double n, double y);

}  // namespace ehpc
