#include "ehpc/stochastic.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <stdexcept>
#include <vector>

#include "ehpc/special_functions.hpp"

namespace ehpc {

std::string to_string(ChannelModel m) {
  switch (m) {
    case ChannelModel::kRayleigh: return "rayleigh";
    case ChannelModel::kMiso: return "miso";
    case ChannelModel::kSimo: return "simo";
    case ChannelModel::kMimo: return "mimo";
  }
  return "unknown";
}

ChannelModel channel_model_from_string(const std::string& s) {
  if (s == "rayleigh") return ChannelModel::kRayleigh;
  if (s == "miso") return ChannelModel::kMiso;
  if (s == "simo") return ChannelModel::kSimo;
  if (s == "mimo") return ChannelModel::kMimo;
  throw std::invalid_argument("unknown channel model '" + s + "'");
}

int ChannelConfig::diversity_order() const {
  switch (model) {
    case ChannelModel::kRayleigh: return 1;
    case ChannelModel::kMiso:
    case ChannelModel::kSimo: return antennas;
    case ChannelModel::kMimo: return 0;
  }
  return 0;
}

void validate(const ArrivalConfig& cfg) {
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda))
    throw std::invalid_argument("arrivals: lambda must be a finite nonnegative rate");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha))
    throw std::invalid_argument("arrivals: alpha must be a finite nonnegative energy");
}

void validate(const ChannelConfig& cfg) {
  if (!(cfg.mean_gain > 0.0) || !std::isfinite(cfg.mean_gain))
    throw std::invalid_argument("channel: mean gain must be positive");
  if (!(cfg.outage_eta > 0.0 && cfg.outage_eta < 1.0))
    throw std::invalid_argument("channel: outage probability must lie in (0, 1)");
  if ((cfg.model == ChannelModel::kMiso || cfg.model == ChannelModel::kSimo) &&
      (cfg.antennas < 1 || cfg.antennas > 64))
    throw std::invalid_argument("channel: antenna count must lie in [1, 64]");
  if (cfg.model == ChannelModel::kMimo &&
      (cfg.n_tx < 1 || cfg.n_rx < 1 || cfg.n_tx > 16 || cfg.n_rx > 16))
    throw std::invalid_argument("channel: MIMO dimensions must lie in [1, 16]");
}

double draw_arrival(const ArrivalConfig& cfg, Rng& rng) {
  if (cfg.lambda <= 0.0 || cfg.alpha <= 0.0) return 0.0;
  std::poisson_distribution<int> units(cfg.lambda);
  const int k = units(rng);
  std::uniform_real_distribution<double> amount(0.0, 2.0 * cfg.alpha);
  double total = 0.0;
  for (int i = 0; i < k; ++i) total += amount(rng);
  return total;
}

double largest_singular_value_squared(std::span<const std::complex<double>> h, int rows,
                                      int cols, double rel_tol) {
  if (rows < 1 || cols < 1 || h.size() != static_cast<std::size_t>(rows * cols))
    throw std::invalid_argument("largest_singular_value_squared: shape mismatch");
  // Gram matrix on the smaller side; both share the nonzero spectrum.
  const bool wide = cols > rows;
  const int n = wide ? rows : cols;
  const int m = wide ? cols : rows;
  auto at = [&](int r, int c) { return h[static_cast<std::size_t>(r * cols + c)]; };
  std::vector<std::complex<double>> gram(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::complex<double> acc = 0.0;
      for (int k = 0; k < m; ++k) {
        acc += wide ? at(i, k) * std::conj(at(j, k)) : std::conj(at(k, i)) * at(k, j);
      }
      gram[static_cast<std::size_t>(i * n + j)] = acc;
    }
  }
  if (n == 1) return gram[0].real();

  std::vector<std::complex<double>> v(static_cast<std::size_t>(n), 1.0 / std::sqrt(n));
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  double lambda = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    for (int i = 0; i < n; ++i) {
      std::complex<double> acc = 0.0;
      for (int j = 0; j < n; ++j) acc += gram[static_cast<std::size_t>(i * n + j)] * v[j];
      w[static_cast<std::size_t>(i)] = acc;
    }
    // Rayleigh quotient v^H G v with ||v|| = 1.
    std::complex<double> rq = 0.0;
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      rq += std::conj(v[i]) * w[i];
      norm2 += std::norm(w[i]);
    }
    const double next = rq.real();
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) return 0.0;
    for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
    if (iter > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

double draw_gamma(const ChannelConfig& cfg, Rng& rng) {
  switch (cfg.model) {
    case ChannelModel::kRayleigh: {
      std::exponential_distribution<double> gain(1.0 / cfg.mean_gain);
      return gain(rng);
    }
    case ChannelModel::kMiso:
    case ChannelModel::kSimo: {
      // ||h||^2 with i.i.d. CN(0, mean_gain) branches: a sum of exponentials.
      std::exponential_distribution<double> branch(1.0 / cfg.mean_gain);
      double total = 0.0;
      for (int i = 0; i < cfg.antennas; ++i) total += branch(rng);
      return total;
    }
    case ChannelModel::kMimo: {
      std::normal_distribution<double> part(0.0, std::sqrt(0.5 * cfg.mean_gain));
      std::array<std::complex<double>, 256> entries{};
      const int count = cfg.n_rx * cfg.n_tx;
      for (int i = 0; i < count; ++i) entries[static_cast<std::size_t>(i)] = {part(rng), part(rng)};
      return largest_singular_value_squared(
          std::span<const std::complex<double>>(entries.data(), static_cast<std::size_t>(count)),
          cfg.n_rx, cfg.n_tx);
    }
  }
  return 0.0;
}

double gamma_max_for_outage(const ChannelConfig& cfg) {
  validate(cfg);
  const double eta = cfg.outage_eta;
  if (cfg.model == ChannelModel::kRayleigh ||
      (cfg.model != ChannelModel::kMimo && cfg.antennas == 1)) {
    return -cfg.mean_gain * std::log(eta);
  }
  if (cfg.model == ChannelModel::kMimo) {
    std::vector<double> draws(kQuantileDraws);
    for (std::size_t i = 0; i < draws.size(); ++i) {
      Rng rng = make_stream(cfg.seed, 0, i, StreamTag::kQuantile);
      draws[i] = draw_gamma(cfg, rng);
    }
    const auto rank = static_cast<std::size_t>(std::floor((1.0 - eta) * draws.size()));
    std::nth_element(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(rank), draws.end());
    return draws[rank];
  }
  // Gamma(N, mean_gain): solve Q(N, x) = eta in the unit-mean variable.
  const double n = cfg.antennas;
  double lo = 0.0;
  double hi = std::max(1.0, n);
  while (regularized_upper_gamma(n, hi) > eta) hi *= 2.0;
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    mid = 0.5 * (lo + hi);
    const double q = regularized_upper_gamma(n, mid);
    if (std::abs(q - eta) < 1e-12 * eta || !(mid > lo && mid < hi)) break;
    (q > eta ? lo : hi) = mid;
  }
  return cfg.mean_gain * mid;
}

}  // namespace ehpc
