#pragma once

#include <cstddef>
#include <functional>

namespace ehpc {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  std::size_t max_intervals = 4000;
  /// Semi-infinite integrals stop where the integrand falls below this
  /// fraction of the largest value seen.
  double tail_cutoff = 1e-18;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Integral over [a, inf) for integrands with exponential-type decay. The
/// upper limit is found by geometric stepping until the tail cutoff holds.
QuadratureResult integrate_to_infinity(const Integrand& f, double a,
                                       const QuadratureOptions& opts = {});

}  // namespace ehpc
