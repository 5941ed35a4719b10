#include "ehpc/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "ehpc/quadrature.hpp"
#include "ehpc/special_functions.hpp"

namespace ehpc {

double g_constant_quadrature(int diversity, double branch_mean, double p_max,
                             double gamma_max) {
  if (diversity < 1) throw std::invalid_argument("g_constant: diversity order must be >= 1");
  if (!(gamma_max > 0.0) || !(branch_mean > 0.0) || !(p_max >= 0.0))
    throw std::invalid_argument("g_constant: requires gamma_max > 0, mean > 0, p_max >= 0");
  const double lower = gamma_max / branch_mean;
  const double n = diversity;
  // Scale the integrand by e^lower so the tail is O(1) instead of O(eta).
  auto integrand = [&](double u) {
    return std::log1p(branch_mean * p_max * u) * std::exp((n - 1.0) * std::log(u) - (u - lower));
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-13;
  opts.rel_tol = 1e-13;
  const double scaled = integrate_to_infinity(integrand, lower, opts).value;
  // upper_incomplete_gamma(n, lower) * e^lower, formed without underflow.
  const double scaled_tail =
      regularized_upper_gamma(n, lower) * std::exp(std::lgamma(n) + lower);
  return scaled / scaled_tail;
}

double g_constant_closed_form(double mean, double p_max, double gamma_max) {
  if (!(gamma_max > 0.0) || !(mean > 0.0) || !(p_max > 0.0))
    throw std::invalid_argument("g_constant: requires gamma_max > 0, mean > 0, p_max > 0");
  const double go = gamma_max / mean + 1.0 / (mean * p_max);
  return std::log1p(p_max * gamma_max) + scaled_exponential_integral_e1(go);
}

double g_constant_tabulated(std::span<const double> gains, std::span<const double> density,
                            double p_max, double gamma_max) {
  if (gains.size() != density.size() || gains.size() < 2)
    throw std::invalid_argument("g_constant_tabulated: need matching grids of size >= 2");
  double mass = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i + 1 < gains.size(); ++i) {
    const double lo = gains[i];
    const double hi = gains[i + 1];
    if (!(hi > lo)) throw std::invalid_argument("g_constant_tabulated: gains must increase");
    if (hi <= gamma_max) continue;
    const double a = std::max(lo, gamma_max);
    // Linear interpolation of the density at the clipped left edge.
    const double fa = density[i] + (density[i + 1] - density[i]) * (a - lo) / (hi - lo);
    const double fb = density[i + 1];
    const double w = hi - a;
    mass += 0.5 * w * (fa + fb);
    weighted += 0.5 * w * (fa * std::log1p(p_max * a) + fb * std::log1p(p_max * hi));
  }
  if (!(mass > 0.0)) throw std::invalid_argument("g_constant_tabulated: no mass above gamma_max");
  return weighted / mass;
}

double g_constant(const ChannelConfig& channel, double p_max, double gamma_max) {
  validate(channel);
  const int n = channel.diversity_order();
  if (n == 0)
    throw std::invalid_argument("g_constant: MIMO gains need a tabulated density");
  if (n == 1) return g_constant_closed_form(channel.mean_gain, p_max, gamma_max);
  return g_constant_quadrature(n, channel.mean_gain, p_max, gamma_max);
}

BoundReport bound_report(const BatteryConfig& battery, const ControllerParams& params,
                         const ChannelConfig& channel) {
  validate(battery);
  if (!(params.v_max > 0.0)) throw std::invalid_argument("bounds: V_max is not positive");
  BoundReport r;
  r.b_const = params.b_const;
  r.v_max = params.v_max;
  r.v = params.v;
  r.a_shift = params.a;
  r.x_low = params.x_low;
  r.x_up = params.x_up;
  r.gamma_max = params.gamma_max;
  r.eta = params.eta;
  r.gap_bounded = params.b_const / params.v;
  r.g_const = g_constant(channel, battery.p_max, params.gamma_max);
  r.gap_total = (1.0 - r.eta) * r.gap_bounded + r.eta * r.g_const;
  return r;
}

}  // namespace ehpc
