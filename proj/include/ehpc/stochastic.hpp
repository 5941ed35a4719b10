#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>

#include "ehpc/rng.hpp"

namespace ehpc {

/// Compound-Poisson energy arrivals: K ~ Poisson(lambda) units per slot, each
/// unit carrying Uniform[0, 2 alpha] joules.
struct ArrivalConfig {
  double lambda = 0.5;
  double alpha = 0.2;
};

enum class ChannelModel { kRayleigh, kMiso, kSimo, kMimo };

std::string to_string(ChannelModel m);
ChannelModel channel_model_from_string(const std::string& s);

/// Fading model for the normalized gain gamma(t) = |h|^2 / sigma_N^2.
/// `mean_gain` is the mean per-branch (per-entry for MIMO) normalized gain,
/// linear scale.
struct ChannelConfig {
  ChannelModel model = ChannelModel::kRayleigh;
  int antennas = 1;  // miso: transmit antennas, simo: receive antennas
  int n_tx = 1;      // mimo only
  int n_rx = 1;      // mimo only
  double mean_gain = 10.0;
  double outage_eta = 0.01;
  std::uint64_t seed = 1;  // drives the empirical MIMO quantile

  /// Shape N of the Gamma(N, mean_gain) law; 0 for MIMO (no closed form).
  int diversity_order() const;
};

void validate(const ArrivalConfig& cfg);
void validate(const ChannelConfig& cfg);

struct SystemState {
  double e_a = 0.0;
  double gamma = 0.0;
};

double draw_arrival(const ArrivalConfig& cfg, Rng& rng);
double draw_gamma(const ChannelConfig& cfg, Rng& rng);

/// Largest eigenvalue of H^H H (= squared largest singular value of H) for a
/// row-major rows x cols matrix, by power iteration to relative tolerance
/// `rel_tol`.
double largest_singular_value_squared(std::span<const std::complex<double>> h, int rows,
                                      int cols, double rel_tol = 1e-10);

/// Draws used by the empirical MIMO quantile.
inline constexpr std::size_t kQuantileDraws = 1'000'000;

/// Gain cap with Prob(gamma > gamma_max) = outage_eta.
double gamma_max_for_outage(const ChannelConfig& cfg);

inline double truncate_gamma(double gamma, double gamma_max) {
  return gamma < gamma_max ? gamma : gamma_max;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace ehpc
