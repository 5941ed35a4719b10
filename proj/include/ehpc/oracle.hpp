#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehpc/battery.hpp"
#include "ehpc/rng.hpp"

namespace ehpc {

struct DiscreteDistribution {
  std::vector<double> values;  // ascending
  std::vector<double> probs;

  std::size_t sample_index(Rng& rng) const;
  double sample(Rng& rng) const { return values[sample_index(rng)]; }
  double mean() const;
};

/// Finite average-reward model of the harvesting link: battery levels on a
/// grid, i.i.d. discrete gains and arrivals, and a finite power menu. The
/// post-slot battery level is snapped to the nearest grid point.
struct DiscreteMdp {
  BatteryConfig battery;
  std::vector<double> battery_grid;  // ascending, from e_min to e_max
  std::vector<double> power_grid;    // ascending in [0, p_max], starts at 0
  DiscreteDistribution gamma;
  DiscreteDistribution arrival;

  std::size_t n_b() const { return battery_grid.size(); }
  std::size_t n_p() const { return power_grid.size(); }
  std::size_t n_g() const { return gamma.values.size(); }
  std::size_t n_a() const { return arrival.values.size(); }

  /// Uniform grids: battery step `battery_step` J, powers 0..p_max in
  /// steps of `power_step` W.
  static DiscreteMdp uniform(const BatteryConfig& battery, double battery_step, double power_step,
                             DiscreteDistribution gamma, DiscreteDistribution arrival);
};

inline constexpr std::size_t kMaxMdpSize = 10'000'000;

void validate(const DiscreteMdp& mdp);

/// Nearest battery level (ties go to the lower level).
std::size_t snap(const DiscreteMdp& mdp, double e_b);

/// Power index per (battery, gain, arrival) state.
struct Policy {
  std::size_t n_b = 0, n_g = 0, n_a = 0;
  std::vector<std::uint32_t> action;

  std::size_t index(std::size_t b, std::size_t g, std::size_t a) const {
    return (b * n_g + g) * n_a + a;
  }
  std::uint32_t at(std::size_t b, std::size_t g, std::size_t a) const {
    return action[index(b, g, a)];
  }
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::size_t iterations, double span)
      : std::runtime_error(what), iterations_(iterations), span_(span) {}
  std::size_t iterations() const { return iterations_; }
  double span() const { return span_; }

 private:
  std::size_t iterations_;
  double span_;
};

struct ViOptions {
  double tol = 1e-9;
  std::size_t max_iterations = 2'000'000;
  double damping = 0.5;  // aperiodicity transform h <- h + damping (Th - h)
  std::optional<std::vector<double>> initial_values;
};

struct ViResult {
  double gain = 0.0;  // optimal long-run average rate, nats/slot
  double gain_lower = 0.0;
  double gain_upper = 0.0;
  std::size_t iterations = 0;
  std::vector<double> relative_values;  // per battery level
  Policy policy;
};

/// Relative value iteration. Stops once the span of Th - h drops below
/// tol; throws NonConvergence with the last span otherwise.
ViResult value_iteration(const DiscreteMdp& mdp, const ViOptions& opts = {});

/// Long-run average rate of a stationary policy from each starting battery
/// level, from the limit of the slot-to-slot transition matrix.
std::vector<double> evaluate_policy(const DiscreteMdp& mdp, const Policy& policy);

double policy_rollout(const DiscreteMdp& mdp, const Policy& policy, std::size_t horizon,
                      std::size_t start_level, Rng& rng);

using PowerLaw = std::function<double(double e_b, double gamma, double e_a)>;

/// Tabulates a continuous controller on the grid, rounding each power down
/// to the nearest feasible menu entry.
Policy project_policy(const DiscreteMdp& mdp, const PowerLaw& law);

bool feasible(const DiscreteMdp& mdp, std::size_t b, std::size_t p);

/// Best stationary deterministic policy by exhaustive enumeration; only for
/// toy models.
double enumerate_best_gain(const DiscreteMdp& mdp);

struct OracleInstance {
  std::string id;
  BatteryConfig battery;
  double battery_step = 0.1;
  double power_step = 0.1;
  DiscreteDistribution gamma;
  DiscreteDistribution arrival;

  /// `refinement` halvings of both grid spacings.
  DiscreteMdp mdp(int refinement = 0) const;
};

std::vector<OracleInstance> standard_oracle_instances();

struct GapCheckOptions {
  std::size_t horizon = 200'000;
  std::size_t replicas = 8;
  std::uint64_t seed = 1;
  double vi_tol = 1e-9;
};

struct GapCheckRow {
  std::string id;
  std::size_t n_b = 0;
  double vi_gain = 0.0;
  double vi_gain_refined = 0.0;
  double eps_disc = 0.0;
  double alg1_rate = 0.0;
  double alg1_stderr = 0.0;
  double v = 0.0;
  double b_over_v = 0.0;
  double gap = 0.0;    // vi_gain - alg1_rate
  double slack = 0.0;  // b_over_v + eps_disc - gap
  bool pass = false;
};

/// Runs the drift-plus-penalty controller at V = V_max on the continuous
/// battery with the instance's discrete draws, and compares its rate to
/// the grid optimum.
GapCheckRow gap_check(const OracleInstance& inst, const GapCheckOptions& opts = {});

}  // namespace ehpc
