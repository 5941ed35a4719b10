#include "ehpc/battery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ehpc {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("battery: " + msg);
}

void check_inputs(const BatteryConfig& cfg, double e_b, double p, double e_a) {
  require(std::isfinite(p) && p >= 0.0 && p <= cfg.p_max, "power outside [0, p_max]");
  require(std::isfinite(e_b) && e_b >= cfg.e_min && e_b <= cfg.e_max,
          "state of battery outside [e_min, e_max]");
  require(std::isfinite(e_a) && e_a >= 0.0, "negative energy arrival");
}

}  // namespace

void validate(const BatteryConfig& cfg) {
  require(std::isfinite(cfg.e_min) && std::isfinite(cfg.e_max), "non-finite capacity");
  require(cfg.e_min >= 0.0, "e_min must be nonnegative");
  require(cfg.e_min < cfg.e_max, "e_min must be below e_max");
  require(cfg.dt > 0.0, "dt must be positive");
  require(cfg.p_max > 0.0, "p_max must be positive");
  require(cfg.e_c_max > 0.0, "e_c_max must be positive");
  require(cfg.rho_c > 0.0 && cfg.rho_c <= 1.0, "rho_c must lie in (0, 1]");
  require(cfg.rho_d >= 1.0 && std::isfinite(cfg.rho_d), "rho_d must lie in [1, inf)");
  require(cfg.max_drain() <= cfg.capacity(), "rho_d * dt * p_max exceeds e_max - e_min");
  require(cfg.e_c_max <= cfg.dt * cfg.p_max, "e_c_max exceeds dt * p_max");
  require(cfg.capacity() - cfg.max_charge() - cfg.max_drain() > 0.0,
          "e_max - e_min must exceed the per-slot charge plus discharge amounts");
}

double harvestable(const BatteryConfig& cfg, double e_b, double p, double e_a) {
  check_inputs(cfg, e_b, p, e_a);
  const double room = cfg.e_max - (e_b - cfg.dt * p);
  return std::max(0.0, std::min({room, cfg.rho_c * e_a, cfg.max_charge()}));
}

double max_feasible_power(const BatteryConfig& cfg, double e_b) {
  const double headroom = std::max(0.0, e_b - cfg.e_min);
  return std::min(cfg.p_max, headroom / cfg.joules_per_watt());
}

StepResult step(const BatteryConfig& cfg, BatteryState state, double p, double e_a) {
  check_inputs(cfg, state.e_b, p, e_a);
  const double headroom = state.e_b - cfg.e_min;
  const double excess = cfg.drain(p) - headroom;
  if (excess > 0.0) {
    if (excess > kFeasibilitySlack) {
      std::ostringstream os;
      os.precision(17);
      os << "battery: power " << p << " W drains " << cfg.drain(p) << " J but only "
         << headroom << " J is available above e_min";
      throw InfeasiblePower(os.str(), state.e_b, p);
    }
    p = std::max(0.0, headroom / cfg.joules_per_watt());
  }
  const double e_s = harvestable(cfg, state.e_b, p, e_a);
  const double next = state.e_b - cfg.drain(p) + e_s;
  // Round-off only: the min() in harvestable keeps `next` within the bounds.
  return {BatteryState{std::clamp(next, cfg.e_min, cfg.e_max)}, e_s, p};
}

}  // namespace ehpc
