#include "ehpc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ehpc {

double v_max_for(const BatteryConfig& battery, double gamma_max) {
  const double zeta = gamma_max / battery.joules_per_watt();
  return (battery.capacity() - battery.max_charge() - battery.max_drain()) / zeta;
}

ControllerParams ControllerParams::make(const BatteryConfig& battery, double gamma_max,
                                        double eta, std::optional<double> v) {
  validate(battery);
  if (!(gamma_max > 0.0) || !std::isfinite(gamma_max))
    throw std::invalid_argument("controller: gamma_max must be positive and finite");
  if (!(eta >= 0.0 && eta < 1.0))
    throw std::invalid_argument("controller: outage probability must lie in [0, 1)");

  ControllerParams p;
  p.battery = battery;
  p.gamma_max = gamma_max;
  p.eta = eta;
  p.zeta_max = gamma_max / battery.joules_per_watt();
  p.v_max = v_max_for(battery, gamma_max);
  if (!(p.v_max > 0.0)) throw std::invalid_argument("controller: V_max is not positive");
  p.v = v.value_or(p.v_max);
  if (!(p.v > 0.0) || p.v > p.v_max * (1.0 + 1e-12))
    throw std::invalid_argument("controller: V must lie in (0, V_max]");
  p.v = std::min(p.v, p.v_max);
  p.a = battery.max_drain() + battery.e_min + p.v * p.zeta_max;
  p.x_low = -p.v * p.zeta_max - battery.max_drain();
  p.x_up = battery.max_charge();
  const double swing = std::max(battery.max_charge(), battery.max_drain());
  p.b_const = 0.5 * swing * swing;
  return p;
}

ControllerState initial_state(const ControllerParams& params, double e_b0) {
  return {e_b0 - params.a, e_b0, 0};
}

double p_star(const ControllerParams& params, double x, double gamma) {
  if (!(gamma > 0.0)) return 0.0;
  const double k = params.battery.joules_per_watt();
  const double p_max = params.battery.p_max;
  const double full_power_above = -params.v / (k * (p_max + 1.0 / gamma));
  if (x > full_power_above) return p_max;
  const double silent_below = -params.v * gamma / k;
  if (x < silent_below) return 0.0;
  return std::clamp(-params.v / (k * x) - 1.0 / gamma, 0.0, p_max);
}

BatteryThresholds battery_thresholds(const ControllerParams& params, double gamma) {
  const double k = params.battery.joules_per_watt();
  const double base = params.battery.max_drain() + params.battery.e_min;
  const double p_max = params.battery.p_max;
  return {base + params.v * (params.zeta_max - gamma / k),
          base + params.v * (params.zeta_max - 1.0 / (k * (p_max + 1.0 / gamma)))};
}

double p_star_from_eb(const ControllerParams& params, double e_b, double gamma) {
  if (!(gamma > 0.0)) return 0.0;
  const BatteryThresholds th = battery_thresholds(params, gamma);
  const double p_max = params.battery.p_max;
  if (e_b < th.lower) return 0.0;
  if (e_b > th.upper) return p_max;
  const double k = params.battery.joules_per_watt();
  const double water = params.v / (k * (params.v * params.zeta_max + params.battery.max_drain() +
                                        params.battery.e_min - e_b));
  return std::clamp(water - 1.0 / gamma, 0.0, p_max);
}

double algorithm1_decide(const ControllerParams& params, const ControllerState& state,
                         double gamma) {
  if (gamma > params.gamma_max * (1.0 + 1e-12))
    throw std::invalid_argument("algorithm1: gain above gamma_max (bounded-fading contract)");
  return p_star(params, state.x, gamma);
}

double algorithm2_decide(const ControllerParams& params, const ControllerState& state,
                         double gamma) {
  const double p = p_star(params, state.x, gamma);
  if (gamma <= params.gamma_max) return p;
  const BatteryConfig& bat = params.battery;
  const double e_b = state.x + params.a;
  if (bat.drain(p) <= e_b - bat.e_min + kFeasibilitySlack) return p;
  const double steer = std::max(0.0, (e_b - state.ebar_e) / bat.joules_per_watt());
  return std::min(steer, max_feasible_power(bat, e_b));
}

ControllerState update_queue(const ControllerParams& params, const ControllerState& state,
                             double p, double e_s) {
  const double drained = params.battery.drain(p);
  const double end_of_slot = state.x + params.a - drained;
  ControllerState next;
  next.x = state.x - drained + e_s;
  next.t = state.t + 1;
  next.ebar_e = state.ebar_e + (end_of_slot - state.ebar_e) / static_cast<double>(next.t);
  return next;
}

}  // namespace ehpc
