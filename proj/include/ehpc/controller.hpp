#pragma once

#include <cstdint>
#include <optional>

#include "ehpc/battery.hpp"

namespace ehpc {

/// Constants of the drift-plus-penalty power law.
///
/// The battery energies enter through the per-slot charge cap
/// rho_c * E_c,max and the drain rho_d * dt * P; with unit efficiencies every
/// derived constant reduces to the textbook form, e.g.
///   V_max = (E_max - E_min - E_c,max - dt P_max) / zeta_max,
///   A     = dt P_max + E_min + V zeta_max,
///   B     = max(E_c,max, dt P_max)^2 / 2.
struct ControllerParams {
  BatteryConfig battery;
  double gamma_max = 0.0;  // design cap on the normalized gain
  double zeta_max = 0.0;   // gamma_max per joule-per-watt (gamma_max / dt)
  double eta = 0.0;        // outage probability that produced gamma_max
  double v = 0.0;          // Lyapunov weight
  double a = 0.0;          // queue shift: X = E_b - a
  double v_max = 0.0;
  double b_const = 0.0;
  double x_low = 0.0;
  double x_up = 0.0;

  /// Builds and validates the parameter set. `v` defaults to v_max; values
  /// outside (0, v_max] throw std::invalid_argument.
  static ControllerParams make(const BatteryConfig& battery, double gamma_max, double eta,
                               std::optional<double> v = std::nullopt);
};

/// Largest admissible weight for the given battery and gain cap.
double v_max_for(const BatteryConfig& battery, double gamma_max);

struct ControllerState {
  double x = 0.0;       // virtual queue, J (negative in normal operation)
  double ebar_e = 0.0;  // running mean of end-of-slot state of battery
  std::uint64_t t = 0;  // slots completed
};

ControllerState initial_state(const ControllerParams& params, double e_b0);

/// Minimizer over [0, P_max] of the per-slot objective
///   X (E_s - dt P) - V ln(1 + P gamma).
double p_star(const ControllerParams& params, double x, double gamma);

struct BatteryThresholds {
  double lower;  // below: stay silent
  double upper;  // above: full power
};

BatteryThresholds battery_thresholds(const ControllerParams& params, double gamma);

/// Same law expressed on the state of battery through the two thresholds.
double p_star_from_eb(const ControllerParams& params, double e_b, double gamma);

/// Bounded-fading controller; throws std::invalid_argument if gamma exceeds
/// the design cap.
double algorithm1_decide(const ControllerParams& params, const ControllerState& state,
                         double gamma);

/// Unbounded-fading controller: the bounded law, except when an outage slot
/// would overdraw the battery, in which case the power steers the
/// end-of-slot level back to its historical mean.
double algorithm2_decide(const ControllerParams& params, const ControllerState& state,
                         double gamma);

/// Advances the virtual queue, X' = X - rho_d dt P + E_s, and folds the
/// end-of-slot level into the running mean.
ControllerState update_queue(const ControllerParams& params, const ControllerState& state,
                             double p, double e_s);

}  // namespace ehpc
