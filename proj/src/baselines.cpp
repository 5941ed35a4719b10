#include "ehpc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ehpc/special_functions.hpp"

namespace ehpc {

GainLaw GainLaw::gamma(int shape, double branch_mean) {
  if (shape < 1) throw std::invalid_argument("GainLaw: shape must be >= 1");
  if (!(branch_mean > 0.0)) throw std::invalid_argument("GainLaw: mean must be positive");
  GainLaw law;
  law.shape_ = shape;
  law.mean_ = branch_mean;
  return law;
}

GainLaw GainLaw::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("GainLaw: empty sample");
  std::sort(samples.begin(), samples.end());
  if (!(samples.front() > 0.0))
    throw std::invalid_argument("GainLaw: empirical gains must be positive");
  std::vector<double> suffix(samples.size() + 1, 0.0);
  for (std::size_t i = samples.size(); i-- > 0;) suffix[i] = suffix[i + 1] + 1.0 / samples[i];
  GainLaw law;
  law.shape_ = 0;
  law.mean_ = 0.0;
  law.sorted_ = std::make_shared<const std::vector<double>>(std::move(samples));
  law.suffix_inverse_ = std::make_shared<const std::vector<double>>(std::move(suffix));
  return law;
}

GainLaw GainLaw::from_channel(const ChannelConfig& cfg) {
  validate(cfg);
  if (cfg.model != ChannelModel::kMimo) return gamma(cfg.diversity_order(), cfg.mean_gain);
  std::vector<double> draws(kQuantileDraws);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    Rng rng = make_stream(cfg.seed, 0, i, StreamTag::kQuantile);
    draws[i] = draw_gamma(cfg, rng);
  }
  return empirical(std::move(draws));
}

double GainLaw::pdf(double g) const {
  if (!analytic()) throw std::logic_error("GainLaw: empirical law has no density");
  if (g < 0.0) return 0.0;
  const double u = g / mean_;
  return std::exp((shape_ - 1) * std::log(u) - u - std::lgamma(shape_)) / mean_;
}

double GainLaw::tail(double g) const {
  if (g <= 0.0) return 1.0;
  if (analytic()) return regularized_upper_gamma(shape_, g / mean_);
  const auto& xs = *sorted_;
  const auto it = std::upper_bound(xs.begin(), xs.end(), g);
  return static_cast<double>(xs.end() - it) / static_cast<double>(xs.size());
}

double GainLaw::inverse_tail(double g) const {
  if (analytic()) {
    if (g <= 0.0) return shape_ == 1 ? std::numeric_limits<double>::infinity()
                                     : 1.0 / (mean_ * (shape_ - 1));
    return upper_incomplete_gamma(shape_ - 1, g / mean_) / (mean_ * std::tgamma(shape_));
  }
  const auto& xs = *sorted_;
  const auto idx = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), g) - xs.begin());
  return (*suffix_inverse_)[idx] / static_cast<double>(xs.size());
}

double GainLaw::support_max() const {
  return analytic() ? std::numeric_limits<double>::infinity() : sorted_->back();
}

double eawf_lhs(const GainLaw& law, double gamma0) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("eawf_lhs: cutoff must be positive");
  if (gamma0 >= law.support_max()) return 0.0;
  return std::max(0.0, law.tail(gamma0) / gamma0 - law.inverse_tail(gamma0));
}

std::optional<double> eawf_cutoff(const EawfConfig& cfg, double e_b) {
  if (!(cfg.root_tol > 0.0)) throw std::invalid_argument("eawf: root_tol must be positive");
  if (!(e_b > 0.0)) return std::nullopt;
  constexpr double kLowest = 1e-12;
  if (eawf_lhs(cfg.law, kLowest) <= e_b) return kLowest;

  double hi = cfg.law.analytic() ? cfg.law.branch_mean() : 1.0;
  hi = std::min(hi, cfg.law.support_max());
  while (eawf_lhs(cfg.law, hi) > e_b) hi *= 2.0;
  double lo = std::min(kLowest, hi);

  // Bisect in log(g0): the bracket spans many decades.
  double mid = hi;
  for (int iter = 0; iter < 300; ++iter) {
    mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    const double r = eawf_lhs(cfg.law, mid) - e_b;
    if (std::abs(r) < cfg.root_tol) break;
    (r > 0.0 ? lo : hi) = mid;
  }
  return mid;
}

double eawf_decide(const EawfConfig& cfg, const BatteryConfig& battery, double e_b,
                   double gamma) {
  if (!(gamma > 0.0)) return 0.0;
  const auto cutoff = eawf_cutoff(cfg, e_b);
  if (!cutoff) return 0.0;
  const double water = std::max(0.0, 1.0 / *cutoff - 1.0 / gamma);
  return std::min(water, max_feasible_power(battery, e_b));
}

double greedy_decide(const BatteryConfig& battery, double e_b) {
  return max_feasible_power(battery, e_b);
}

double halving_decide(const BatteryConfig& battery, double e_b) {
  return 0.5 * greedy_decide(battery, e_b);
}

}  // namespace ehpc
