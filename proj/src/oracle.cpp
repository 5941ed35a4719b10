#include "ehpc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ehpc/controller.hpp"

namespace ehpc {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("oracle: " + msg);
}

void check_distribution(const DiscreteDistribution& d, const char* name) {
  require(!d.values.empty(), std::string(name) + " distribution is empty");
  require(d.values.size() == d.probs.size(), std::string(name) + " values/probs size mismatch");
  require(std::is_sorted(d.values.begin(), d.values.end()),
          std::string(name) + " values must be ascending");
  double total = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    require(d.values[i] >= 0.0 && std::isfinite(d.values[i]),
            std::string(name) + " values must be finite and nonnegative");
    require(d.probs[i] >= 0.0, std::string(name) + " probabilities must be nonnegative");
    total += d.probs[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, std::string(name) + " probabilities must sum to 1");
}

std::vector<double> uniform_grid(double lo, double hi, double step, const char* name) {
  require(step > 0.0, std::string(name) + " step must be positive");
  const double cells = (hi - lo) / step;
  const double n = std::round(cells);
  require(n >= 1.0 && std::abs(cells - n) <= 1e-9 * std::max(1.0, cells),
          std::string(name) + " step must divide the range");
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = lo + static_cast<double>(i) * step;
  grid.back() = hi;
  return grid;
}

/// Deterministic part of the chain: landing level for every
/// (level, arrival, power), or npos when the power is infeasible.
struct Tables {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t n_b, n_g, n_a, n_p;
  std::vector<std::size_t> next;  // [(b * n_a + a) * n_p + p]
  std::vector<double> reward;     // [g * n_p + p]

  explicit Tables(const DiscreteMdp& mdp)
      : n_b(mdp.n_b()), n_g(mdp.n_g()), n_a(mdp.n_a()), n_p(mdp.n_p()) {
    next.assign(n_b * n_a * n_p, npos);
    reward.assign(n_g * n_p, 0.0);
    for (std::size_t b = 0; b < n_b; ++b) {
      const double e_b = mdp.battery_grid[b];
      for (std::size_t p = 0; p < n_p; ++p) {
        if (!feasible(mdp, b, p)) continue;
        const double pw = mdp.power_grid[p];
        for (std::size_t a = 0; a < n_a; ++a) {
          const double e_s = harvestable(mdp.battery, e_b, pw, mdp.arrival.values[a]);
          next[(b * n_a + a) * n_p + p] = snap(mdp, e_b - mdp.battery.drain(pw) + e_s);
        }
      }
    }
    for (std::size_t g = 0; g < n_g; ++g)
      for (std::size_t p = 0; p < n_p; ++p)
        reward[g * n_p + p] = std::log1p(mdp.power_grid[p] * mdp.gamma.values[g]);
  }

  std::size_t land(std::size_t b, std::size_t a, std::size_t p) const {
    return next[(b * n_a + a) * n_p + p];
  }
};

using Matrix = std::vector<double>;  // row-major n x n

Matrix multiply(const Matrix& x, const Matrix& y, std::size_t n) {
  Matrix z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double xik = x[i * n + k];
      if (xik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) z[i * n + j] += xik * y[k * n + j];
    }
  return z;
}

}  // namespace

std::size_t DiscreteDistribution::sample_index(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

double DiscreteDistribution::mean() const {
  return std::inner_product(values.begin(), values.end(), probs.begin(), 0.0);
}

DiscreteMdp DiscreteMdp::uniform(const BatteryConfig& battery, double battery_step,
                                 double power_step, DiscreteDistribution gamma,
                                 DiscreteDistribution arrival) {
  DiscreteMdp mdp;
  mdp.battery = battery;
  mdp.battery_grid = uniform_grid(battery.e_min, battery.e_max, battery_step, "battery");
  mdp.power_grid = uniform_grid(0.0, battery.p_max, power_step, "power");
  mdp.gamma = std::move(gamma);
  mdp.arrival = std::move(arrival);
  validate(mdp);
  return mdp;
}

void validate(const DiscreteMdp& mdp) {
  const BatteryConfig& bat = mdp.battery;
  require(bat.e_min >= 0.0 && bat.e_min < bat.e_max, "need 0 <= e_min < e_max");
  require(bat.dt > 0.0 && bat.p_max > 0.0 && bat.e_c_max > 0.0,
          "dt, p_max and e_c_max must be positive");
  require(bat.rho_c > 0.0 && bat.rho_c <= 1.0 && bat.rho_d >= 1.0, "efficiencies out of range");
  require(mdp.battery_grid.size() >= 2, "battery grid needs at least two levels");
  require(std::is_sorted(mdp.battery_grid.begin(), mdp.battery_grid.end()) &&
              std::adjacent_find(mdp.battery_grid.begin(), mdp.battery_grid.end()) ==
                  mdp.battery_grid.end(),
          "battery grid must be strictly ascending");
  require(mdp.battery_grid.front() == bat.e_min && mdp.battery_grid.back() == bat.e_max,
          "battery grid must span [e_min, e_max]");
  require(!mdp.power_grid.empty() && mdp.power_grid.front() == 0.0,
          "power grid must start at 0");
  require(std::is_sorted(mdp.power_grid.begin(), mdp.power_grid.end()) &&
              mdp.power_grid.back() <= bat.p_max,
          "power grid must be ascending within [0, p_max]");
  check_distribution(mdp.gamma, "gain");
  check_distribution(mdp.arrival, "arrival");
  require(mdp.n_b() * mdp.n_g() * mdp.n_a() * mdp.n_p() <= kMaxMdpSize,
          "model too large to enumerate");
}

std::size_t snap(const DiscreteMdp& mdp, double e_b) {
  const auto& grid = mdp.battery_grid;
  const auto it = std::lower_bound(grid.begin(), grid.end(), e_b);
  if (it == grid.begin()) return 0;
  if (it == grid.end()) return grid.size() - 1;
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  return (e_b - grid[hi - 1] <= grid[hi] - e_b) ? hi - 1 : hi;
}

bool feasible(const DiscreteMdp& mdp, std::size_t b, std::size_t p) {
  return mdp.battery.drain(mdp.power_grid[p]) <=
         mdp.battery_grid[b] - mdp.battery.e_min + kFeasibilitySlack;
}

ViResult value_iteration(const DiscreteMdp& mdp, const ViOptions& opts) {
  validate(mdp);
  require(opts.tol > 0.0, "tolerance must be positive");
  require(opts.damping > 0.0 && opts.damping <= 1.0, "damping must lie in (0, 1]");
  const Tables tab(mdp);
  const std::size_t n_b = tab.n_b, n_g = tab.n_g, n_a = tab.n_a, n_p = tab.n_p;

  std::vector<double> h(n_b, 0.0);
  if (opts.initial_values) {
    require(opts.initial_values->size() == n_b, "initial values need one entry per level");
    h = *opts.initial_values;
  }
  std::vector<double> th(n_b);
  ViResult res;
  res.policy = Policy{n_b, n_g, n_a, std::vector<std::uint32_t>(n_b * n_g * n_a, 0)};

  // One Bellman backup; records the greedy action when `keep` is set.
  auto backup = [&](bool keep) {
    for (std::size_t b = 0; b < n_b; ++b) {
      double total = 0.0;
      for (std::size_t g = 0; g < n_g; ++g) {
        const double pg = mdp.gamma.probs[g];
        for (std::size_t a = 0; a < n_a; ++a) {
          double best = -std::numeric_limits<double>::infinity();
          std::uint32_t arg = 0;
          for (std::size_t p = 0; p < n_p; ++p) {
            const std::size_t nb = tab.land(b, a, p);
            if (nb == Tables::npos) break;  // powers ascend, so the rest are infeasible too
            const double q = tab.reward[g * n_p + p] + h[nb];
            if (q > best) {
              best = q;
              arg = static_cast<std::uint32_t>(p);
            }
          }
          total += pg * mdp.arrival.probs[a] * best;
          if (keep) res.policy.action[res.policy.index(b, g, a)] = arg;
        }
      }
      th[b] = total;
    }
  };

  double span = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 1; iter <= opts.max_iterations; ++iter) {
    backup(false);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t b = 0; b < n_b; ++b) {
      const double d = th[b] - h[b];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    span = hi - lo;
    if (span < opts.tol) {
      backup(true);
      res.gain_lower = lo;
      res.gain_upper = hi;
      res.gain = 0.5 * (lo + hi);
      res.iterations = iter;
      res.relative_values = h;
      return res;
    }
    const double ref = h[0] + opts.damping * (th[0] - h[0]);
    for (std::size_t b = 0; b < n_b; ++b) h[b] = h[b] + opts.damping * (th[b] - h[b]) - ref;
  }
  std::ostringstream os;
  os << "value iteration did not converge in " << opts.max_iterations
     << " iterations (span " << span << ", tolerance " << opts.tol << ")";
  throw NonConvergence(os.str(), opts.max_iterations, span);
}

std::vector<double> evaluate_policy(const DiscreteMdp& mdp, const Policy& policy) {
  validate(mdp);
  const Tables tab(mdp);
  const std::size_t n = tab.n_b;
  require(policy.n_b == n && policy.n_g == tab.n_g && policy.n_a == tab.n_a &&
              policy.action.size() == n * tab.n_g * tab.n_a,
          "policy shape does not match the model");

  // Lazy chain 0.5 (I + P) has the same Cesaro limit as P and is aperiodic;
  // repeated squaring reaches its limit matrix.
  Matrix m(n * n, 0.0);
  std::vector<double> rbar(n, 0.0);
  for (std::size_t b = 0; b < n; ++b) {
    m[b * n + b] += 0.5;
    for (std::size_t g = 0; g < tab.n_g; ++g)
      for (std::size_t a = 0; a < tab.n_a; ++a) {
        const std::uint32_t p = policy.at(b, g, a);
        require(p < tab.n_p, "policy action out of range");
        const std::size_t nb = tab.land(b, a, p);
        require(nb != Tables::npos, "policy uses an infeasible power");
        const double w = mdp.gamma.probs[g] * mdp.arrival.probs[a];
        m[b * n + nb] += 0.5 * w;
        rbar[b] += w * tab.reward[g * tab.n_p + p];
      }
  }
  for (int k = 0; k < 64; ++k) {
    m = multiply(m, m, n);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += m[i * n + j];
      for (std::size_t j = 0; j < n; ++j) m[i * n + j] /= row;
    }
  }
  std::vector<double> gains(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gains[i] += m[i * n + j] * rbar[j];
  return gains;
}

double policy_rollout(const DiscreteMdp& mdp, const Policy& policy, std::size_t horizon,
                      std::size_t start_level, Rng& rng) {
  validate(mdp);
  require(horizon >= 1, "rollout horizon must be >= 1");
  require(start_level < mdp.n_b(), "start level out of range");
  const Tables tab(mdp);
  std::size_t b = start_level;
  double sum = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t g = mdp.gamma.sample_index(rng);
    const std::size_t a = mdp.arrival.sample_index(rng);
    const std::uint32_t p = policy.at(b, g, a);
    const std::size_t nb = tab.land(b, a, p);
    require(nb != Tables::npos, "policy uses an infeasible power");
    sum += tab.reward[g * tab.n_p + p];
    b = nb;
  }
  return sum / static_cast<double>(horizon);
}

Policy project_policy(const DiscreteMdp& mdp, const PowerLaw& law) {
  validate(mdp);
  Policy pol{mdp.n_b(), mdp.n_g(), mdp.n_a(),
             std::vector<std::uint32_t>(mdp.n_b() * mdp.n_g() * mdp.n_a(), 0)};
  for (std::size_t b = 0; b < mdp.n_b(); ++b)
    for (std::size_t g = 0; g < mdp.n_g(); ++g)
      for (std::size_t a = 0; a < mdp.n_a(); ++a) {
        const double want = law(mdp.battery_grid[b], mdp.gamma.values[g], mdp.arrival.values[a]);
        std::uint32_t pick = 0;
        for (std::size_t p = 0; p < mdp.n_p(); ++p) {
          if (mdp.power_grid[p] > want + 1e-12 || !feasible(mdp, b, p)) break;
          pick = static_cast<std::uint32_t>(p);
        }
        pol.action[pol.index(b, g, a)] = pick;
      }
  return pol;
}

double enumerate_best_gain(const DiscreteMdp& mdp) {
  validate(mdp);
  const std::size_t states = mdp.n_b() * mdp.n_g() * mdp.n_a();
  Policy pol{mdp.n_b(), mdp.n_g(), mdp.n_a(), std::vector<std::uint32_t>(states, 0)};
  std::vector<std::uint32_t> choices(states, 1);
  double count = 1.0;
  for (std::size_t b = 0; b < mdp.n_b(); ++b) {
    std::uint32_t k = 0;
    while (k < mdp.n_p() && feasible(mdp, b, k)) ++k;
    for (std::size_t g = 0; g < mdp.n_g(); ++g)
      for (std::size_t a = 0; a < mdp.n_a(); ++a) choices[pol.index(b, g, a)] = k;
    count *= std::pow(static_cast<double>(k), static_cast<double>(mdp.n_g() * mdp.n_a()));
  }
  require(count <= 1e7, "too many policies to enumerate");

  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    const auto gains = evaluate_policy(mdp, pol);
    best = std::max(best, *std::max_element(gains.begin(), gains.end()));
    std::size_t i = 0;
    while (i < states && ++pol.action[i] == choices[i]) pol.action[i++] = 0;
    if (i == states) break;
  }
  return best;
}

DiscreteMdp OracleInstance::mdp(int refinement) const {
  require(refinement >= 0, "refinement must be nonnegative");
  const double scale = std::ldexp(1.0, -refinement);
  return DiscreteMdp::uniform(battery, battery_step * scale, power_step * scale, gamma, arrival);
}

std::vector<OracleInstance> standard_oracle_instances() {
  std::vector<OracleInstance> out;

  OracleInstance a;
  a.id = "small-5J";
  a.battery = BatteryConfig{0.0, 5.0, 0.3, 0.5, 1.0, 1.0, 1.0};
  a.battery_step = 0.1;
  a.power_step = 0.1;
  a.gamma = {{1.0, 3.0, 6.0, 10.0}, {0.4, 0.3, 0.2, 0.1}};
  a.arrival = {{0.0, 0.2, 0.3}, {0.5, 0.3, 0.2}};
  out.push_back(a);

  OracleInstance b;
  b.id = "tiny-2.5J";
  b.battery = BatteryConfig{0.0, 2.5, 0.3, 0.5, 1.0, 1.0, 1.0};
  b.battery_step = 0.1;
  b.power_step = 0.1;
  b.gamma = {{0.5, 2.0, 8.0}, {0.5, 0.3, 0.2}};
  b.arrival = {{0.0, 0.1, 0.3}, {0.4, 0.4, 0.2}};
  out.push_back(b);

  OracleInstance c;
  c.id = "half-slot";
  c.battery = BatteryConfig{0.0, 2.5, 0.2, 0.5, 0.5, 1.0, 1.0};
  c.battery_step = 0.05;
  c.power_step = 0.1;
  c.gamma = {{1.0, 4.0, 12.0}, {0.5, 0.35, 0.15}};
  c.arrival = {{0.0, 0.1, 0.2}, {0.5, 0.3, 0.2}};
  out.push_back(c);

  return out;
}

GapCheckRow gap_check(const OracleInstance& inst, const GapCheckOptions& opts) {
  require(opts.horizon >= 1 && opts.replicas >= 1, "horizon and replicas must be >= 1");
  ViOptions vo;
  vo.tol = opts.vi_tol;
  const DiscreteMdp base = inst.mdp(0);
  const ViResult coarse = value_iteration(base, vo);
  const ViResult fine = value_iteration(inst.mdp(1), vo);

  const ControllerParams params =
      ControllerParams::make(inst.battery, inst.gamma.values.back(), 0.0);

  std::vector<double> rates(opts.replicas, 0.0);
  for (std::size_t r = 0; r < opts.replicas; ++r) {
    BatteryState bat{inst.battery.e_max};
    ControllerState ctl = initial_state(params, bat.e_b);
    double sum = 0.0;
    for (std::size_t t = 0; t < opts.horizon; ++t) {
      Rng rng = make_stream(opts.seed, r, t, StreamTag::kRollout);
      const double gamma = inst.gamma.sample(rng);
      const double e_a = inst.arrival.sample(rng);
      const double p = algorithm1_decide(params, ctl, gamma);
      const StepResult res = step(inst.battery, bat, p, e_a);
      ctl = update_queue(params, ctl, res.p, res.e_s);
      bat = res.next;
      sum += std::log1p(res.p * gamma);
    }
    rates[r] = sum / static_cast<double>(opts.horizon);
  }
  const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) /
                      static_cast<double>(rates.size());
  double ss = 0.0;
  for (double x : rates) ss += (x - mean) * (x - mean);

  GapCheckRow row;
  row.id = inst.id;
  row.n_b = base.n_b();
  row.vi_gain = coarse.gain;
  row.vi_gain_refined = fine.gain;
  row.eps_disc = std::abs(fine.gain - coarse.gain);
  row.alg1_rate = mean;
  row.alg1_stderr = rates.size() > 1
                        ? std::sqrt(ss / static_cast<double>(rates.size() - 1) /
                                    static_cast<double>(rates.size()))
                        : 0.0;
  row.v = params.v;
  row.b_over_v = params.b_const / params.v;
  row.gap = row.vi_gain - row.alg1_rate;
  row.slack = row.b_over_v + row.eps_disc - row.gap;
  row.pass = row.slack >= 0.0;
  return row;
}

}  // namespace ehpc
