#pragma once

#include <stdexcept>
#include <string>

namespace ehpc {

/// Physical parameters of the storage battery. Energies in J, power in W,
/// time in s.
struct BatteryConfig {
  double e_min = 0.0;
  double e_max = 50.0;
  double e_c_max = 0.3;  // max energy accepted per slot (before rho_c)
  double p_max = 0.5;
  double dt = 1.0;
  double rho_c = 1.0;  // charging efficiency, (0, 1]
  double rho_d = 1.0;  // discharging efficiency, [1, inf)

  /// Energy removed from storage when transmitting at power `p` for a slot.
  double drain(double p) const { return rho_d * dt * p; }
  /// Energy removed per watt of transmit power over one slot.
  double joules_per_watt() const { return rho_d * dt; }
  double max_drain() const { return drain(p_max); }
  double max_charge() const { return rho_c * e_c_max; }
  double capacity() const { return e_max - e_min; }
};

/// Throws std::invalid_argument naming the violated relation.
void validate(const BatteryConfig& cfg);

struct BatteryState {
  double e_b = 0.0;
};

/// Round-off allowance (J) absorbed by the discharge feasibility check.
inline constexpr double kFeasibilitySlack = 1e-12;

/// Raised when a requested power would drain the battery below e_min.
class InfeasiblePower : public std::domain_error {
 public:
  InfeasiblePower(const std::string& what, double e_b, double p)
      : std::domain_error(what), e_b_(e_b), p_(p) {}
  double e_b() const { return e_b_; }
  double power() const { return p_; }

 private:
  double e_b_;
  double p_;
};

/// Energy actually stored at the end of the slot: limited by the room left
/// after discharging, the (efficiency-scaled) arrival and the charge rate.
double harvestable(const BatteryConfig& cfg, double e_b, double p, double e_a);

/// Largest power satisfying both the power cap and the discharge limit.
double max_feasible_power(const BatteryConfig& cfg, double e_b);

struct StepResult {
  BatteryState next;
  double e_s = 0.0;  // energy stored this slot
  double p = 0.0;    // power actually applied (after round-off clamp)
};

/// One slot of the state-of-battery recursion
///   E_b(t+1) = E_b(t) - rho_d dt P(t) + E_s(t).
/// Throws InfeasiblePower if the discharge limit is violated by more than
/// kFeasibilitySlack, std::invalid_argument on out-of-range inputs.
StepResult step(const BatteryConfig& cfg, BatteryState state, double p, double e_a);

}  // namespace ehpc
