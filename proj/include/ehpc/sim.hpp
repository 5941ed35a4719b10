#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehpc/baselines.hpp"
#include "ehpc/battery.hpp"
#include "ehpc/controller.hpp"
#include "ehpc/stochastic.hpp"

namespace ehpc {

enum class ControllerKind { kAlg1, kAlg2, kEawf, kGreedy, kHalving };

std::string to_string(ControllerKind k);
ControllerKind controller_from_string(const std::string& s);

enum class RateUnit { kNats, kBits };

struct ScenarioConfig {
  BatteryConfig battery;
  ArrivalConfig arrivals;
  ChannelConfig channel;
  ControllerKind controller = ControllerKind::kAlg2;
  std::optional<double> v;          // unset: V_max
  std::optional<double> gamma_max;  // unset: derived from the outage probability
  std::size_t horizon = 20000;
  std::size_t replicas = 100;
  std::optional<double> e_b0;   // J; takes precedence over the fraction
  double e_b0_fraction = 1.0;   // of e_max - e_min, above e_min
  std::uint64_t seed = 1;
  RateUnit rate_unit = RateUnit::kNats;
  unsigned threads = 0;  // 0: hardware concurrency

  double initial_energy() const;
};

void validate(const ScenarioConfig& cfg);

/// A scenario with every derived quantity resolved once for all replicas.
struct Scenario {
  ScenarioConfig cfg;
  ControllerParams params;
  std::optional<EawfConfig> eawf;

  static Scenario prepare(const ScenarioConfig& cfg);
};

struct SlotRecord {
  std::size_t t = 0;
  double e_a = 0.0;
  double gamma = 0.0;  // gain seen by the controller (truncated for alg1)
  double p = 0.0;
  double rate = 0.0;
  double e_s = 0.0;
  double e_b_end = 0.0;  // state of battery entering slot t + 1
  double x = 0.0;        // virtual queue entering slot t + 1
};

/// Raised when a trajectory leaves the feasible set; carries the slot.
class InfeasibleSlot : public std::runtime_error {
 public:
  InfeasibleSlot(const std::string& what, std::size_t replica, std::size_t slot)
      : std::runtime_error(what), replica_(replica), slot_(slot) {}
  std::size_t replica() const { return replica_; }
  std::size_t slot() const { return slot_; }

 private:
  std::size_t replica_;
  std::size_t slot_;
};

using SlotVisitor = std::function<void(const SlotRecord&)>;

/// Runs one replica slot by slot, handing each record to `visit`. Exogenous
/// draws depend only on (seed, replica, slot).
void simulate_replica(const Scenario& scenario, std::size_t replica, const SlotVisitor& visit);

std::vector<SlotRecord> run_replica(const ScenarioConfig& cfg, std::size_t replica);

struct SimSummary {
  ControllerKind controller = ControllerKind::kAlg2;
  std::size_t horizon = 0;
  std::size_t replicas = 0;
  /// series[t] = mean over replicas of (1/(t+1)) sum_{tau<=t} R(tau).
  std::vector<double> avg_rate_series;
  std::vector<double> stderr_series;
  double final_avg_rate = 0.0;
  double final_stderr = 0.0;
  std::vector<double> replica_rates;
  /// E_b(T) - E_b(0) - sum_t (E_s - rho_d dt P), per replica.
  std::vector<double> conservation_residuals;
  double mean_power = 0.0;
  std::uint64_t outage_slots = 0;
};

SimSummary run_scenario(const ScenarioConfig& cfg);

enum class SweepAxis { kV, kEMax, kLambdaAlpha, kSnrN };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

/// Axis coordinates: (V), (E_max J), (lambda, alpha J), (SNR dB, N).
struct SweepPoint {
  double first = 0.0;
  double second = 0.0;
};

struct SweepCell {
  ControllerKind controller = ControllerKind::kAlg2;
  double final_avg_rate = 0.0;
  double final_stderr = 0.0;
};

struct SweepRow {
  SweepPoint point;
  std::vector<SweepCell> cells;
};

ScenarioConfig apply_sweep_point(const ScenarioConfig& base, SweepAxis axis, SweepPoint point);

/// One scenario per (point, controller). Every point reuses the base seed,
/// so all points and controllers see the same exogenous sample paths.
std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis,
                            std::span<const SweepPoint> points,
                            std::span<const ControllerKind> controllers);

}  // namespace ehpc
