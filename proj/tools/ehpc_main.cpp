// Command-line front end: run, sweep, bounds and oracle subcommands.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ehpc/bounds.hpp"
#include "ehpc/cli/config.hpp"
#include "ehpc/cli/emit.hpp"
#include "ehpc/oracle.hpp"
#include "ehpc/sim.hpp"

namespace {

using namespace ehpc;
namespace fs = std::filesystem;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::optional<std::string> config;
  std::string out = "out";
  std::string format = "csv";
  std::vector<std::string> overrides;
  std::optional<std::size_t> replicas;
  std::optional<std::size_t> horizon;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "JSON configuration file (omitted keys take defaults)");
  app->add_option("--out", o.out, "Output directory")->capture_default_str();
  app->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app->add_option("--set", o.overrides, "Override a key, e.g. battery.e_max_joule=10 (repeatable)");
  app->add_option("--replicas", o.replicas, "Monte Carlo replicas");
  app->add_option("--horizon", o.horizon, "Slots per replica");
  app->add_option("--seed", o.seed, "Base seed");
}

ScenarioConfig load(const CommonOptions& o) {
  std::vector<std::string> kv = o.overrides;
  if (o.replicas) kv.push_back("sim.replicas=" + std::to_string(*o.replicas));
  if (o.horizon) kv.push_back("sim.horizon_slots=" + std::to_string(*o.horizon));
  if (o.seed) kv.push_back("sim.seed=" + std::to_string(*o.seed));
  std::optional<fs::path> path;
  if (o.config) path = *o.config;
  return cli::parse_config(path, kv);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  const double x = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return x;
}

std::vector<SweepPoint> parse_points(SweepAxis axis, const std::string& spec) {
  std::vector<SweepPoint> pts;
  const bool paired = axis == SweepAxis::kLambdaAlpha || axis == SweepAxis::kSnrN;
  for (const std::string& item : split(spec, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != (paired ? 2u : 1u))
      throw std::invalid_argument("sweep point '" + item + "' should be " +
                                  (paired ? "a:b" : "a single number"));
    try {
      pts.push_back({parse_number(parts[0]), paired ? parse_number(parts[1]) : 0.0});
    } catch (const std::logic_error&) {
      throw std::invalid_argument("malformed sweep point '" + item + "'");
    }
  }
  if (pts.empty()) throw std::invalid_argument("no sweep points given");
  return pts;
}

std::vector<SweepPoint> default_points(SweepAxis axis, const ScenarioConfig& base) {
  switch (axis) {
    case SweepAxis::kV: {
      const double vmax = Scenario::prepare(base).params.v_max;
      std::vector<SweepPoint> pts;
      for (int k = 1; k <= 8; ++k) pts.push_back({vmax * k / 8.0, 0.0});
      return pts;
    }
    case SweepAxis::kEMax:
      return {{1, 0}, {2, 0}, {5, 0}, {10, 0}, {20, 0}, {50, 0}};
    case SweepAxis::kLambdaAlpha:
      return {{0.25, 0.2}, {0.5, 0.2}, {1.0, 0.2}, {0.5, 0.1}, {0.5, 0.4}};
    case SweepAxis::kSnrN: {
      std::vector<SweepPoint> pts;
      for (double n : {1.0, 2.0, 4.0})
        for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) pts.push_back({snr, n});
      return pts;
    }
  }
  return {};
}

void report(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-harvesting link power control: simulation, bounds and oracle"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, bounds_opts, oracle_opts;

  CLI::App* run = app.add_subcommand("run", "Simulate one scenario");
  add_common(run, run_opts);
  bool trace = false;
  std::size_t trace_replicas = 1;
  run->add_flag("--trace", trace, "Also write the per-slot trace.csv");
  run->add_option("--trace-replicas", trace_replicas, "Replicas included in the trace")
      ->capture_default_str();

  CLI::App* sw = app.add_subcommand("sweep", "Sweep one axis for several controllers");
  add_common(sw, sweep_opts);
  std::string axis_name;
  std::string points_spec;
  std::string controllers_spec = "alg2,greedy";
  sw->add_option("--axis", axis_name, "v, e_max, lambda_alpha or snr_n")
      ->required()
      ->check(CLI::IsMember({"v", "e_max", "lambda_alpha", "snr_n"}));
  sw->add_option("--points", points_spec,
                 "Comma-separated points; lambda_alpha and snr_n take pairs a:b");
  sw->add_option("--controllers", controllers_spec, "Comma-separated controllers")
      ->capture_default_str();

  CLI::App* bd = app.add_subcommand("bounds", "Evaluate the closed-form constants and gap bounds");
  add_common(bd, bounds_opts);

  CLI::App* orc = app.add_subcommand("oracle", "Compare the controller against the grid optimum");
  add_common(orc, oracle_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) {
      const ScenarioConfig cfg = load(run_opts);
      const SimSummary summary = run_scenario(cfg);
      std::vector<cli::ReplicaTrace> traces;
      if (trace)
        for (std::size_t r = 0; r < std::min(trace_replicas, cfg.replicas); ++r)
          traces.push_back({r, run_replica(cfg, r)});
      report(cli::emit_run(summary, traces, cli::format_from_string(run_opts.format), run_opts.out));
      std::cout << to_string(cfg.controller) << " final_avg_rate "
                << cli::format_double(summary.final_avg_rate) << " stderr "
                << cli::format_double(summary.final_stderr) << '\n';
    } else if (*sw) {
      const ScenarioConfig base = load(sweep_opts);
      const SweepAxis axis = sweep_axis_from_string(axis_name);
      const auto points = points_spec.empty() ? default_points(axis, base) : parse_points(axis, points_spec);
      std::vector<ControllerKind> controllers;
      for (const auto& name : split(controllers_spec, ',')) controllers.push_back(controller_from_string(name));
      const auto rows = sweep(base, axis, points, controllers);
      report(cli::emit_sweep(axis, rows, cli::format_from_string(sweep_opts.format), sweep_opts.out));
    } else if (*bd) {
      const ScenarioConfig cfg = load(bounds_opts);
      const Scenario sc = Scenario::prepare(cfg);
      const BoundReport r = bound_report(cfg.battery, sc.params, cfg.channel);
      report(cli::emit_bounds(r, bounds_opts.out));
    } else if (*orc) {
      GapCheckOptions go;
      if (oracle_opts.horizon) go.horizon = *oracle_opts.horizon;
      if (oracle_opts.replicas) go.replicas = *oracle_opts.replicas;
      if (oracle_opts.seed) go.seed = *oracle_opts.seed;
      if (oracle_opts.config || !oracle_opts.overrides.empty())
        std::cerr << "note: the oracle runs its built-in instances; --config and --set are ignored\n";
      std::vector<GapCheckRow> rows;
      bool all_pass = true;
      for (const auto& inst : standard_oracle_instances()) {
        rows.push_back(gap_check(inst, go));
        all_pass = all_pass && rows.back().pass;
      }
      report(cli::emit_oracle(rows, cli::format_from_string(oracle_opts.format), oracle_opts.out));
      if (!all_pass) {
        std::cerr << "gap check failed on at least one instance\n";
        return kExitCheckFailed;
      }
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return EXIT_SUCCESS;
}
