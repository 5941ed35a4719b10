#pragma once

#include <span>

#include "ehpc/battery.hpp"
#include "ehpc/controller.hpp"
#include "ehpc/stochastic.hpp"

namespace ehpc {

/// Closed-form constants and optimality-gap bounds, rates in nats.
struct BoundReport {
  double b_const = 0.0;      // J^2
  double v_max = 0.0;
  double v = 0.0;
  double a_shift = 0.0;      // J
  double x_low = 0.0;        // J
  double x_up = 0.0;         // J
  double gamma_max = 0.0;
  double gap_bounded = 0.0;  // B / V
  double g_const = 0.0;      // outage-slot gap
  double gap_total = 0.0;    // (1 - eta) B / V + eta G
  double eta = 0.0;
};

/// Outage gap constant G for the Gamma(N, branch_mean) gain law,
///   G = C int_{gamma_max / mean}^inf ln(1 + mean P_max u) u^(N-1) e^-u du,
///   C = 1 / upper_incomplete_gamma(N, gamma_max / mean),
/// evaluated by adaptive quadrature.
double g_constant_quadrature(int diversity, double branch_mean, double p_max, double gamma_max);

/// Single-antenna closed form
///   G = ln(1 + P_max gamma_max) + e^go E1(go),
///   go = gamma_max / mean + 1 / (mean P_max).
double g_constant_closed_form(double mean, double p_max, double gamma_max);

/// G for a tabulated density (trapezoidal rule over the tail of the grid),
/// for gain laws without a parametric form.
double g_constant_tabulated(std::span<const double> gains, std::span<const double> density,
                            double p_max, double gamma_max);

/// G for the configured channel: closed form for N = 1, quadrature for
/// N > 1. MIMO has no parametric density; use g_constant_tabulated.
double g_constant(const ChannelConfig& channel, double p_max, double gamma_max);

/// Throws std::invalid_argument if V_max <= 0 or the channel is MIMO.
BoundReport bound_report(const BatteryConfig& battery, const ControllerParams& params,
                         const ChannelConfig& channel);

}  // namespace ehpc
