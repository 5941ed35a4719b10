#include "ehpc/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace ehpc {

namespace {

constexpr double kQueueTolerance = 1e-9;

double rate_of(RateUnit unit, double p, double gamma) {
  const double nats = std::log1p(p * gamma);
  return unit == RateUnit::kBits ? nats / std::numbers::ln2 : nats;
}

std::string slot_diagnostic(std::size_t replica, std::size_t t, double e_b, double x,
                            double gamma, double p, const std::string& reason) {
  std::ostringstream os;
  os.precision(17);
  os << "replica " << replica << " slot " << t << ": " << reason << " (e_b=" << e_b
     << ", x=" << x << ", gamma=" << gamma << ", p=" << p << ")";
  return os.str();
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::thread::hardware_concurrency() : requested;
  n = std::max(1u, n);
  return static_cast<unsigned>(std::min<std::size_t>(n, jobs));
}

/// Calls job(i) for i in [0, jobs) on `threads` workers and rethrows the
/// first failure.
template <class Job>
void parallel_for(std::size_t jobs, unsigned threads, Job&& job) {
  const unsigned n = worker_count(threads, jobs);
  if (n <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::kAlg1: return "alg1";
    case ControllerKind::kAlg2: return "alg2";
    case ControllerKind::kEawf: return "eawf";
    case ControllerKind::kGreedy: return "greedy";
    case ControllerKind::kHalving: return "halving";
  }
  return "unknown";
}

ControllerKind controller_from_string(const std::string& s) {
  for (auto k : {ControllerKind::kAlg1, ControllerKind::kAlg2, ControllerKind::kEawf,
                 ControllerKind::kGreedy, ControllerKind::kHalving}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown controller '" + s +
                              "' (expected alg1, alg2, eawf, greedy or halving)");
}

double ScenarioConfig::initial_energy() const {
  if (e_b0) return *e_b0;
  return battery.e_min + e_b0_fraction * battery.capacity();
}

void validate(const ScenarioConfig& cfg) {
  validate(cfg.battery);
  validate(cfg.arrivals);
  validate(cfg.channel);
  if (cfg.horizon < 1) throw std::invalid_argument("scenario: horizon must be >= 1");
  if (cfg.replicas < 1) throw std::invalid_argument("scenario: replicas must be >= 1");
  if (!cfg.e_b0 && !(cfg.e_b0_fraction >= 0.0 && cfg.e_b0_fraction <= 1.0))
    throw std::invalid_argument("scenario: e_b0_fraction must lie in [0, 1]");
  const double e0 = cfg.initial_energy();
  if (!(e0 >= cfg.battery.e_min && e0 <= cfg.battery.e_max))
    throw std::invalid_argument("scenario: e_b0 must lie in [e_min, e_max]");
  if (cfg.gamma_max && !(*cfg.gamma_max > 0.0))
    throw std::invalid_argument("scenario: gamma_max must be positive");
}

Scenario Scenario::prepare(const ScenarioConfig& cfg) {
  validate(cfg);
  Scenario s{cfg, {}, std::nullopt};
  const double gmax = cfg.gamma_max ? *cfg.gamma_max : gamma_max_for_outage(cfg.channel);
  s.params = ControllerParams::make(cfg.battery, gmax, cfg.channel.outage_eta, cfg.v);
  if (cfg.controller == ControllerKind::kEawf) s.eawf = EawfConfig{GainLaw::from_channel(cfg.channel)};
  return s;
}

void simulate_replica(const Scenario& scenario, std::size_t replica, const SlotVisitor& visit) {
  const ScenarioConfig& cfg = scenario.cfg;
  const ControllerParams& params = scenario.params;
  const BatteryConfig& bat = cfg.battery;
  const bool tracks_queue_bounds =
      cfg.controller == ControllerKind::kAlg1 || cfg.controller == ControllerKind::kAlg2;

  BatteryState battery{cfg.initial_energy()};
  ControllerState ctl = initial_state(params, battery.e_b);
  bool queue_entered =
      ctl.x >= params.x_low - kQueueTolerance && ctl.x <= params.x_up + kQueueTolerance;

  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    Rng arrival_rng = make_stream(cfg.seed, replica, t, StreamTag::kArrival);
    Rng channel_rng = make_stream(cfg.seed, replica, t, StreamTag::kChannel);
    const double e_a = draw_arrival(cfg.arrivals, arrival_rng);
    double gamma = draw_gamma(cfg.channel, channel_rng);

    double p = 0.0;
    switch (cfg.controller) {
      case ControllerKind::kAlg1:
        gamma = truncate_gamma(gamma, params.gamma_max);
        p = algorithm1_decide(params, ctl, gamma);
        break;
      case ControllerKind::kAlg2:
        p = algorithm2_decide(params, ctl, gamma);
        break;
      case ControllerKind::kEawf:
        p = eawf_decide(*scenario.eawf, bat, battery.e_b, gamma);
        break;
      case ControllerKind::kGreedy:
        p = greedy_decide(bat, battery.e_b);
        break;
      case ControllerKind::kHalving:
        p = halving_decide(bat, battery.e_b);
        break;
    }

    StepResult res;
    try {
      res = step(bat, battery, p, e_a);
    } catch (const std::exception& e) {
      throw InfeasibleSlot(slot_diagnostic(replica, t, battery.e_b, ctl.x, gamma, p, e.what()),
                           replica, t);
    }
    ctl = update_queue(params, ctl, res.p, res.e_s);
    battery = res.next;

    // The queue is carried separately from the battery, so the two must
    // stay in lockstep up to round-off.
    const double drift = std::abs(ctl.x - (battery.e_b - params.a));
    if (drift > kQueueTolerance * std::max(1.0, std::abs(params.a)))
      throw InfeasibleSlot(
          slot_diagnostic(replica, t, battery.e_b, ctl.x, gamma, res.p, "queue drifted from e_b - A"),
          replica, t);
    const bool in_band =
        ctl.x >= params.x_low - kQueueTolerance && ctl.x <= params.x_up + kQueueTolerance;
    // A battery that starts above A + x_up (possible for V < V_max) drains
    // into the band at full power; the bound applies from then on.
    queue_entered = queue_entered || in_band;
    if (tracks_queue_bounds && queue_entered && !in_band)
      throw InfeasibleSlot(
          slot_diagnostic(replica, t, battery.e_b, ctl.x, gamma, res.p, "queue left [x_low, x_up]"),
          replica, t);

    visit(SlotRecord{t, e_a, gamma, res.p, rate_of(cfg.rate_unit, res.p, gamma), res.e_s,
                     battery.e_b, ctl.x});
  }
}

std::vector<SlotRecord> run_replica(const ScenarioConfig& cfg, std::size_t replica) {
  const Scenario scenario = Scenario::prepare(cfg);
  std::vector<SlotRecord> out;
  out.reserve(cfg.horizon);
  simulate_replica(scenario, replica, [&](const SlotRecord& r) { out.push_back(r); });
  return out;
}

SimSummary run_scenario(const ScenarioConfig& cfg) {
  const Scenario scenario = Scenario::prepare(cfg);
  const std::size_t T = cfg.horizon;
  const std::size_t R = cfg.replicas;

  std::vector<std::vector<double>> rates(R);
  std::vector<double> residual(R, 0.0);
  std::vector<double> power_sum(R, 0.0);
  std::vector<std::uint64_t> outages(R, 0);

  parallel_for(R, cfg.threads, [&](std::size_t r) {
    std::vector<double>& row = rates[r];
    row.reserve(T);
    double flow = 0.0;
    double e_end = cfg.initial_energy();
    simulate_replica(scenario, r, [&](const SlotRecord& rec) {
      row.push_back(rec.rate);
      flow += rec.e_s - cfg.battery.drain(rec.p);
      power_sum[r] += rec.p;
      if (rec.gamma >= scenario.params.gamma_max &&
          (cfg.controller != ControllerKind::kAlg1 || rec.gamma > scenario.params.gamma_max))
        ++outages[r];
      e_end = rec.e_b_end;
    });
    residual[r] = e_end - cfg.initial_energy() - flow;
  });

  SimSummary s;
  s.controller = cfg.controller;
  s.horizon = T;
  s.replicas = R;
  s.avg_rate_series.assign(T, 0.0);
  s.stderr_series.assign(T, 0.0);
  s.conservation_residuals = residual;
  s.replica_rates.assign(R, 0.0);

  // Replica-ordered reduction: the result is independent of scheduling.
  std::vector<double> running(R, 0.0);
  double slot_mean_sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double slot_sum = 0.0;
    for (std::size_t r = 0; r < R; ++r) slot_sum += rates[r][t];
    slot_mean_sum += slot_sum / static_cast<double>(R);
    s.avg_rate_series[t] = slot_mean_sum / static_cast<double>(t + 1);

    double mean = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      running[r] += rates[r][t];
      mean += running[r] / static_cast<double>(t + 1);
    }
    mean /= static_cast<double>(R);
    if (R > 1) {
      double ss = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        const double d = running[r] / static_cast<double>(t + 1) - mean;
        ss += d * d;
      }
      s.stderr_series[t] = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
    }
  }
  for (std::size_t r = 0; r < R; ++r) s.replica_rates[r] = running[r] / static_cast<double>(T);
  s.final_avg_rate = s.avg_rate_series.back();
  s.final_stderr = s.stderr_series.back();

  double total_power = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    total_power += power_sum[r];
    s.outage_slots += outages[r];
  }
  s.mean_power = total_power / static_cast<double>(R * T);
  return s;
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kV: return "v";
    case SweepAxis::kEMax: return "e_max";
    case SweepAxis::kLambdaAlpha: return "lambda_alpha";
    case SweepAxis::kSnrN: return "snr_n";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  for (auto a : {SweepAxis::kV, SweepAxis::kEMax, SweepAxis::kLambdaAlpha, SweepAxis::kSnrN}) {
    if (to_string(a) == s) return a;
  }
  throw std::invalid_argument("unknown sweep axis '" + s +
                              "' (expected v, e_max, lambda_alpha or snr_n)");
}

ScenarioConfig apply_sweep_point(const ScenarioConfig& base, SweepAxis axis, SweepPoint point) {
  ScenarioConfig cfg = base;
  switch (axis) {
    case SweepAxis::kV:
      if (!(point.first > 0.0)) throw std::invalid_argument("sweep: V must be positive");
      cfg.v = point.first;
      break;
    case SweepAxis::kEMax:
      cfg.battery.e_max = point.first;
      break;
    case SweepAxis::kLambdaAlpha:
      cfg.arrivals.lambda = point.first;
      cfg.arrivals.alpha = point.second;
      break;
    case SweepAxis::kSnrN: {
      const double n = point.second;
      if (!(n >= 1.0) || n != std::floor(n))
        throw std::invalid_argument("sweep: antenna count must be a positive integer");
      cfg.channel.model = ChannelModel::kMiso;
      cfg.channel.antennas = static_cast<int>(n);
      cfg.channel.mean_gain = db_to_linear(point.first);
      break;
    }
  }
  validate(cfg);
  return cfg;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis,
                            std::span<const SweepPoint> points,
                            std::span<const ControllerKind> controllers) {
  if (points.empty()) throw std::invalid_argument("sweep: no points");
  if (controllers.empty()) throw std::invalid_argument("sweep: no controllers");
  std::vector<SweepRow> rows;
  rows.reserve(points.size());
  for (const SweepPoint& pt : points) {
    SweepRow row{pt, {}};
    const ScenarioConfig at = apply_sweep_point(base, axis, pt);
    for (ControllerKind k : controllers) {
      ScenarioConfig cfg = at;
      cfg.controller = k;
      const SimSummary s = run_scenario(cfg);
      row.cells.push_back({k, s.final_avg_rate, s.final_stderr});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ehpc
