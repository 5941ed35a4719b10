#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ehpc/battery.hpp"
#include "ehpc/stochastic.hpp"

namespace ehpc {

/// Distribution of the normalized channel gain, as handed to the
/// water-filling baseline. Gamma(N, mean) laws are analytic; anything else
/// (MIMO) is carried as an empirical sample.
class GainLaw {
 public:
  static GainLaw gamma(int shape, double branch_mean);
  static GainLaw exponential(double mean) { return gamma(1, mean); }
  static GainLaw empirical(std::vector<double> samples);
  /// True statistics of the generating channel model.
  static GainLaw from_channel(const ChannelConfig& cfg);

  bool analytic() const { return shape_ > 0; }
  int shape() const { return shape_; }
  double branch_mean() const { return mean_; }

  /// Density; analytic laws only.
  double pdf(double g) const;
  /// Prob(gamma > g).
  double tail(double g) const;
  /// int_g^inf f(gamma) / gamma d gamma.
  double inverse_tail(double g) const;
  /// Largest gain with positive mass (infinity for analytic laws).
  double support_max() const;

 private:
  int shape_ = 1;
  double mean_ = 1.0;
  std::shared_ptr<const std::vector<double>> sorted_;         // empirical only
  std::shared_ptr<const std::vector<double>> suffix_inverse_;  // sum_{j>=i} 1/x_j
};

struct EawfConfig {
  GainLaw law = GainLaw::exponential(10.0);
  double root_tol = 1e-10;
};

/// Left side of the cutoff equation,
///   int_{g0}^inf (1/g0 - 1/gamma) f(gamma) d gamma,
/// strictly decreasing in g0.
double eawf_lhs(const GainLaw& law, double gamma0);

/// Cutoff fade g0 with eawf_lhs(g0) = e_b; nullopt when e_b <= 0.
std::optional<double> eawf_cutoff(const EawfConfig& cfg, double e_b);

/// min{[1/g0 - 1/gamma]^+, P_max, (E_b - E_min) / (rho_d dt)}.
double eawf_decide(const EawfConfig& cfg, const BatteryConfig& battery, double e_b,
                   double gamma);

double greedy_decide(const BatteryConfig& battery, double e_b);
double halving_decide(const BatteryConfig& battery, double e_b);

}  // namespace ehpc
